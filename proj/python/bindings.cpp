#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bloommap/bounds.hpp"
#include "bloommap/errors.hpp"
#include "bloommap/harness.hpp"
#include "bloommap/map_io.hpp"

namespace py = pybind11;
using namespace bloommap;

namespace {

std::vector<KeyValue> to_pairs(const py::iterable& items) {
  std::vector<KeyValue> pairs;
  for (const auto& item : items) {
    const auto t = item.cast<py::tuple>();
    if (t.size() != 2) throw py::value_error("pairs must be (key, value) tuples");
    pairs.push_back({t[0].cast<std::string>(), t[1].cast<std::string>()});
  }
  return pairs;
}

py::dict report_dict(const ErrorReport& r) {
  py::dict d;
  d["f_plus"] = r.f_plus;
  d["f_star"] = r.f_star;
  d["f_minus"] = r.f_minus;
  d["rho"] = r.rho;
  d["neg_probes_mean"] = r.neg_probes_mean;
  d["pos_probes_mean"] = r.pos_probes_mean;
  d["value_counts"] = r.value_counts;
  d["lower_misassignments"] = r.lower_misassignments;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bloommap, m) {
  m.doc() = "Bloom maps: approximate key/value maps with bounded error rates";

  static py::exception<Error> base_error(m, "BloomMapError", PyExc_ValueError);
  static py::exception<FormatError> format_error(m, "FormatError", base_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const FormatError& e) {
      py::set_error(format_error, e.what());
    } catch (const Error& e) {
      py::set_error(base_error, e.what());
    }
  });

  py::class_<ValueDistribution>(m, "ValueDistribution")
      .def(py::init([](const std::vector<double>& weights, std::vector<std::string> labels) {
             return ValueDistribution(weights, std::move(labels));
           }),
           py::arg("weights"), py::arg("labels"))
      .def_property_readonly("probs", &ValueDistribution::probs)
      .def_property_readonly("labels", &ValueDistribution::labels)
      .def("entropy", &ValueDistribution::entropy)
      .def("integer_counts", &ValueDistribution::integer_counts, py::arg("n"))
      .def("__len__", &ValueDistribution::size);

  py::class_<BloomMap>(m, "BloomMap")
      .def(
          "query",
          [](const BloomMap& map, const py::bytes& key) {
            const auto q = map.query(std::string(key));
            py::object value = q.bottom() ? py::object(py::none()) : py::object(py::str(map.label(*q.value)));
            return py::make_tuple(value, q.probes);
          },
          py::arg("key"), "Returns (label or None, bit probes).")
      .def_property_readonly("m", &BloomMap::m)
      .def_property_readonly("n", &BloomMap::n)
      .def_property_readonly("k", &BloomMap::k)
      .def_property_readonly("epsilon", &BloomMap::epsilon)
      .def_property_readonly("variant", [](const BloomMap& map) { return std::string(to_string(map.variant())); })
      .def("zero_fraction", &BloomMap::zero_fraction)
      .def("serialize", [](const BloomMap& map) {
        const auto bytes = serialize(map);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      });

  m.def(
      "build_map",
      [](const py::iterable& items, const ValueDistribution& dist, double epsilon, const std::string& variant,
         std::uint64_t seed) {
        const auto pairs = to_pairs(items);
        return build_map(pairs, dist, epsilon, parse_map_kind(variant), seed);
      },
      py::arg("pairs"), py::arg("dist"), py::arg("epsilon"), py::arg("variant") = "fast", py::arg("seed") = 1);

  m.def(
      "deserialize",
      [](const py::bytes& data) {
        const std::string s(data);
        return deserialize(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
      },
      py::arg("data"));

  m.def(
      "generate_pmap",
      [](std::uint64_t n, const ValueDistribution& dist, std::uint64_t seed) {
        py::list out;
        for (const auto& kv : generate_pmap({n, dist, seed})) out.append(py::make_tuple(py::bytes(kv.key), kv.value));
        return out;
      },
      py::arg("n"), py::arg("dist"), py::arg("seed") = 1);

  m.def(
      "measure",
      [](const BloomMap& map, const py::iterable& items, std::uint64_t neg_samples, std::uint64_t seed) {
        const auto pairs = to_pairs(items);
        ErrorReport r;
        {
          py::gil_scoped_release release;
          r = measure(map, pairs, neg_samples, seed);
        }
        return report_dict(r);
      },
      py::arg("map"), py::arg("pairs"), py::arg("neg_samples") = 100000, py::arg("seed") = 2);

  m.def("space_report", [](const BloomMap& map) {
    const auto r = space_report(map);
    py::dict d;
    d["theorem1_bpk"] = r.theorem1_bpk;
    d["theorem2_bpk"] = r.theorem2_bpk;
    d["corollary3_bpk"] = r.corollary3_bpk;
    d["achieved_bpk"] = r.achieved_bpk;
    d["ratio"] = r.ratio;
    d["simple_bpk"] = r.simple_bpk;
    d["standard_bpk"] = r.standard_bpk;
    d["fast_bpk"] = r.fast_bpk;
    return d;
  });

  m.def("garsia_wachs_depths", [](const std::vector<double>& w) { return garsia_wachs_depths(w); }, py::arg("weights"));
  m.def("lb_theorem1", &lb_theorem1, py::arg("eps_plus"), py::arg("entropy"));
  m.def("lb_theorem2", &lb_theorem2, py::arg("eps_plus"), py::arg("eps_star"), py::arg("eps_minus"),
        py::arg("entropy"));
  m.def("lb_corollary3", &lb_corollary3, py::arg("epsilon"), py::arg("entropy"));
}

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "apt_lab/apt_core.hpp"
#include "apt_lab/certificate.hpp"
#include "apt_lab/cli.hpp"
#include "apt_lab/decide.hpp"
#include "apt_lab/density.hpp"
#include "apt_lab/manin.hpp"

namespace py = pybind11;
using namespace apt_lab;

namespace {

std::string expand_json(const std::string& primes, const std::string& root, std::size_t node_cap,
                        std::size_t depth_cap) {
  return export_tree_json(expand(PrimeSet::parse(primes), NodePair::parse(root), {node_cap, depth_cap}));
}

py::tuple tree_stats_of(const std::string& primes, const std::string& root) {
  auto stats = tree_stats(expand(PrimeSet::parse(primes), NodePair::parse(root)));
  return py::make_tuple(stats.longest_path, stats.longest_chain);
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

std::string search_json(const std::string& primes, const std::string& root, std::size_t depth,
                        std::size_t node_cap) {
  auto r = search_certificate(PrimeSet::parse(primes), NodePair::parse(root), depth, node_cap);
  return r.certificate ? certificate_to_json(*r.certificate).dump() : std::string("null");
}

py::tuple check_json(const std::string& text) {
  auto report = check_certificate(certificate_from_json(Json::parse(text)));
  return py::make_tuple(report.ok, report.diagnostic);
}

std::string reduce_json(unsigned k, std::uint64_t n, const std::string& primes, unsigned j, std::int64_t u,
                        std::int64_t v) {
  ManinContext ctx(k, n, PrimeSet::parse(primes));
  return formal_sum_to_json(Reducer(ctx).reduce({j, ctx.canon(u), ctx.canon(v)})).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Additive prime tree laboratory";
  m.def("expand_json", &expand_json, py::arg("primes"), py::arg("root"), py::arg("node_cap") = 1'000'000,
        py::arg("depth_cap") = 10'000);
  m.def("tree_stats", &tree_stats_of, py::arg("primes"), py::arg("root"));
  m.def("is_finite_type", [](const std::string& primes) {
    return std::holds_alternative<FiniteType>(finite_type_check(PrimeSet::parse(primes), memory_cap_from_env()));
  });
  m.def("search_certificate_json", &search_json, py::arg("primes"), py::arg("root"), py::arg("depth") = 40,
        py::arg("node_cap") = 5'000'000);
  m.def("check_certificate_json", &check_json);
  m.def("c_rational", [](const std::string& primes) {
    auto q = c_rational(PrimeSet::parse(primes));
    return py::make_tuple(q.get_num().get_str(), q.get_den().get_str());
  });
  m.def("reduce_json", &reduce_json, py::arg("k"), py::arg("N"), py::arg("primes"), py::arg("j"), py::arg("u"),
        py::arg("v"));
  m.def("oracle_check", [](unsigned k, std::uint64_t n, const std::string& primes, std::size_t trials) {
    return oracle_check(k, n, PrimeSet::parse(primes), trials);
  });
  m.def("run_cli", &run_cli, "Runs apt-lab in-process and returns (exit code, stdout, stderr).");
}

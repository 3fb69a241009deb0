#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vpiso/decide.hpp"
#include "vpiso/report.hpp"

namespace py = pybind11;
using namespace vpiso;

namespace {

using TextMatrix = std::vector<std::vector<std::string>>;

Matrix from_text(const TextMatrix& rows) {
  const std::size_t n = rows.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = parse_scalar(rows[i][j]);
  }
  return m;
}

TextMatrix to_text(const Matrix& m) {
  TextMatrix rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i].push_back(to_string(m(i, j)));
  return rows;
}

std::vector<std::string> to_text(const std::vector<Integer>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(x.get_str());
  return out;
}

DiophantineSystem select_system(const InstancePair& inst, std::size_t theta_index, int height, bool lie, bool literal) {
  if (lie) return build_lie_system(inst.g.lattice(), inst.gdag.lattice());
  ThetaStream stream(inst, height);
  std::optional<ThetaSpec> t;
  for (std::size_t i = 0; i <= theta_index; ++i)
    if (!(t = stream.next())) throw std::out_of_range("theta index past the end of the stream");
  return build_full_system(system_input(inst, *t), literal ? InverseEncoding::Literal : InverseEncoding::Balanced);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the vpiso package; the public API lives in vpiso/__init__.py";

  py::register_exception<InstanceError>(m, "InstanceError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("parse_instance", [](const std::string& text) { return instance_summary(parse_instance(text)).dump(); });

  m.def(
      "fingerprint",
      [](const std::string& text, const std::string& side, const std::vector<std::uint64_t>& moduli) {
        const auto inst = parse_instance(text);
        if (side != "G" && side != "Gdag") throw std::invalid_argument("side must be G or Gdag");
        return to_json(fingerprint((side == "G" ? inst.g : inst.gdag).tgroup, moduli)).dump();
      },
      py::arg("text"), py::arg("side"), py::arg("moduli"));

  m.def(
      "build_system",
      [](const std::string& text, std::size_t theta_index, int height, bool lie, bool literal) {
        return serialize_system(select_system(parse_instance(text), theta_index, height, lie, literal));
      },
      py::arg("text"), py::arg("theta_index") = 0, py::arg("height") = 1, py::arg("lie") = false,
      py::arg("literal") = false);

  m.def(
      "local_solvability",
      [](const std::string& dio, const std::vector<std::uint64_t>& primes, unsigned max_level,
         std::uint64_t max_nodes, std::size_t max_solutions) {
        const auto sys = parse_system(dio);
        LocalBudgets b;
        b.max_level = max_level;
        b.max_nodes = max_nodes;
        b.max_solutions = max_solutions;
        std::string out;
        {
          py::gil_scoped_release release;
          out = to_json(decide_local(sys, primes, b), sys).dump();
        }
        return out;
      },
      py::arg("dio"), py::arg("primes"), py::arg("max_level") = 6, py::arg("max_nodes") = 10'000'000,
      py::arg("max_solutions") = 1 << 14);

  m.def(
      "solutions_mod",
      [](const std::string& dio, std::uint64_t p, unsigned k, std::uint64_t max_nodes, std::size_t max_solutions) {
        const auto sys = parse_system(dio);
        const auto s = solutions_mod(sys, p, k, SearchBudget{max_nodes, max_solutions});
        return py::make_tuple(s.points, s.truncated, s.nodes);
      },
      py::arg("dio"), py::arg("p"), py::arg("k"), py::arg("max_nodes") = 10'000'000,
      py::arg("max_solutions") = 1 << 16);

  m.def(
      "residuals_vanish",
      [](const std::string& dio, const std::vector<std::string>& witness) {
        std::vector<Integer> w;
        for (const auto& x : witness) w.emplace_back(x);
        return verify_witness(parse_system(dio), w).all_zero();
      },
      py::arg("dio"), py::arg("witness"));

  m.def(
      "decide",
      [](const std::string& text, int height, const std::vector<std::uint64_t>& primes, std::size_t slices,
         unsigned max_level, std::uint64_t max_nodes, std::size_t max_theta, std::uint64_t max_modulus,
         bool lie_first) {
        const auto inst = parse_instance(text);
        DecideConfig cfg;
        cfg.height = height;
        cfg.primes = primes;
        cfg.slices = slices;
        cfg.local.max_level = max_level;
        cfg.local.max_nodes = max_nodes;
        cfg.max_theta = max_theta;
        cfg.max_modulus = max_modulus;
        cfg.mode = lie_first ? Mode::LieFirst : Mode::Full;
        std::string out;
        {
          py::gil_scoped_release release;
          out = to_json(decide(inst, cfg), cfg).dump();
        }
        return out;
      },
      py::arg("text"), py::arg("height") = 1, py::arg("primes") = std::vector<std::uint64_t>{},
      py::arg("slices") = 64, py::arg("max_level") = default_decide_budgets().max_level,
      py::arg("max_nodes") = default_decide_budgets().max_nodes, py::arg("max_theta") = 256,
      py::arg("max_modulus") = 16, py::arg("lie_first") = true);

  m.def("smith_invariants", [](const std::vector<std::vector<long>>& rows, std::size_t width) {
    IntMatrix r(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != width) throw std::invalid_argument("ragged relation matrix");
      for (std::size_t j = 0; j < width; ++j) r(i, j) = rows[i][j];
    }
    const auto inv = smith_invariants(r);
    return py::make_tuple(inv.free_rank, to_text(inv.factors));
  });

  m.def("unipotent_log", [](const TextMatrix& x) { return to_text(unipotent_log(from_text(x))); });
  m.def("nilpotent_exp", [](const TextMatrix& x) { return to_text(nilpotent_exp(from_text(x))); });
  m.def("bch", [](const TextMatrix& x, const TextMatrix& y) { return to_text(bch(from_text(x), from_text(y))); });
}

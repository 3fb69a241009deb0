#include "vpiso/report.hpp"

namespace vpiso {

Json integer_json(const Integer& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

Json to_json(const AbelianInvariants& inv) {
  Json factors = Json::array();
  for (const auto& f : inv.factors) factors.push_back(integer_json(f));
  return Json{{"free_rank", inv.free_rank}, {"factors", factors}, {"text", to_string(inv)}};
}

Json to_json(const QuotientInvariants& q) {
  Json hist = Json::object();
  for (const auto& [order, count] : q.order_histogram) hist[std::to_string(order)] = count;
  return Json{{"modulus", q.modulus},
              {"order", q.order},
              {"class", q.nilpotency_class},
              {"exponent", q.exponent},
              {"abelian_invariants", q.abelian_invariants},
              {"order_histogram", hist}};
}

Json to_json(const Fingerprint& f) {
  Json a = Json::array();
  for (const auto& q : f.quotients) a.push_back(to_json(q));
  return a;
}

Json to_json(const Word& w) { return w.to_string(); }

Json to_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(integer_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const ThetaSpec& t) {
  Json lifts = Json::array();
  for (const auto& w : t.lifts) lifts.push_back(to_json(w));
  return Json{{"free", to_json(t.free)},
              {"cross", to_json(t.cross)},
              {"torsion", to_json(t.torsion)},
              {"lifts", lifts},
              {"user_lifts", t.user_lifts}};
}

namespace {

Json assignment(const std::vector<Integer>& x, const DiophantineSystem& system) {
  Json a = Json::object();
  for (std::size_t i = 0; i < x.size() && i < system.variables.size(); ++i) a[system.variables[i]] = integer_json(x[i]);
  return a;
}

Json index_list(const std::vector<std::size_t>& xs) { return Json(xs); }

}  // namespace

Json to_json(const PrimeVerdict& v, const DiophantineSystem& system) {
  Json j{{"p", v.p}, {"status", status_name(v.status)}, {"level", v.level}, {"nodes", v.nodes}, {"note", v.note}};
  if (v.exact_witness) j["exact_witness"] = assignment(*v.exact_witness, system);
  if (v.certificate) {
    const auto& c = *v.certificate;
    j["certificate"] = Json{{"point", assignment(c.point, system)},
                            {"e", c.e},
                            {"valuation", c.valuation},
                            {"equations", index_list(c.selection.equations)},
                            {"variables", index_list(c.selection.variables)},
                            {"complete", c.complete}};
  }
  return j;
}

Json to_json(const LocalSolvabilityReport& r, const DiophantineSystem& system) {
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v, system));
  Json j{{"overall", overall_name(r.overall)}, {"primes", r.primes}, {"verdicts", verdicts}, {"scope", r.scope}};
  j["failing_prime"] = r.failing_prime ? Json(*r.failing_prime) : Json(nullptr);
  return j;
}

Json to_json(const NegativeCertificate& c) {
  Json j{{"kind", c.kind}, {"invariant", c.invariant}, {"left", c.left}, {"right", c.right}};
  if (c.modulus) j["modulus"] = c.modulus;
  if (c.prime) {
    j["prime"] = *c.prime;
    j["level"] = c.level;
  }
  return j;
}

Json to_json(const Verdict& v, const DecideConfig& cfg) {
  Json j{{"verdict", verdict_name(v.kind)}, {"winner", v.winner}};
  if (v.positive) {
    const auto& p = *v.positive;
    j["positive"] = Json{{"theta_index", p.theta_index},
                         {"theta", to_json(p.theta)},
                         {"system", {{"variables", p.system.variables.size()}, {"polynomials", p.system.size()}}},
                         {"local", to_json(p.report, p.system)}};
  }
  if (v.negative) j["negative"] = to_json(*v.negative);
  Json outcomes = Json::array();
  for (const auto& o : v.outcomes) {
    Json oj{{"index", o.index}, {"status", o.status}, {"note", o.note}, {"theta", to_json(o.theta)}};
    if (o.report) oj["overall"] = overall_name(o.report->overall);
    if (o.report && o.report->failing_prime) oj["failing_prime"] = *o.report->failing_prime;
    outcomes.push_back(oj);
  }
  j["theta_outcomes"] = outcomes;
  j["budgets"] = Json{{"height", cfg.height},
                      {"primes", cfg.primes.empty() ? Json("default") : Json(cfg.primes)},
                      {"slices", cfg.slices},
                      {"max_theta", cfg.max_theta},
                      {"max_modulus", cfg.max_modulus},
                      {"max_level", cfg.local.max_level},
                      {"max_nodes", cfg.local.max_nodes},
                      {"mode", cfg.mode == Mode::LieFirst ? "lie-first" : "full"}};
  j["consumed"] = Json{{"rounds", v.rounds},
                       {"procedure1_steps", v.procedure1_steps},
                       {"procedure2_steps", v.procedure2_steps},
                       {"nodes", v.nodes}};
  j["notes"] = v.notes;
  return j;
}

namespace {

Json side_summary(const IsoInstance& s) {
  Json nwords = Json::array(), rels = Json::array();
  for (const auto& w : s.nwords) nwords.push_back(to_json(w));
  for (const auto& w : s.relators) rels.push_back(to_json(w));
  return Json{{"n", s.n},
              {"generators", s.names},
              {"relators", rels},
              {"nwords", nwords},
              {"hirsch_rank", s.lattice().rank()},
              {"lattice_denominator", integer_json(s.lattice().denominator())},
              {"lattice_from_hull", !s.tgroup.lattice_declared},
              {"abelianization", to_json(s.abelianization.invariants())},
              {"quotient", to_json(s.quotient.invariants())}};
}

}  // namespace

Json instance_summary(const InstancePair& inst) {
  Json j{{"G", side_summary(inst.g)},
         {"Gdag", side_summary(inst.gdag)},
         {"profinite_fitting", inst.profinite_fitting},
         {"lattice_hull", inst.lattice_hull},
         {"theta_given", inst.theta.has_value()},
         {"lifts_given", !inst.lifts.empty()}};
  return j;
}

}  // namespace vpiso

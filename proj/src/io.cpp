#include "edmp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "edmp/cayley_menger.hpp"
#include "edmp/errors.hpp"
#include "edmp/oracle.hpp"

namespace edmp::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view tok, int line) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(ErrorKind::InvalidInput, "line " + std::to_string(line) + ": not a number: '" + std::string(tok) + "'");
  }
  return v;
}

Matrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_real(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  const auto n = rows.size();
  if (n == 0) throw Error(ErrorKind::InvalidInput, "no matrix rows");
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw Error(ErrorKind::InvalidInput, "row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                               " values, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) d(i, j) = rows[i][j];
  }
  return d;
}

Matrix parse_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::InvalidInput, std::string("JSON: ") + ex.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("d")) {
      throw Error(ErrorKind::InvalidInput, "JSON matrix needs keys \"n\" and \"d\"");
    }
    if (!doc["n"].is_number_integer()) throw Error(ErrorKind::InvalidInput, "\"n\" must be an integer");
    const auto n = doc["n"].get<long long>();
    const json& rows = doc["d"];
    if (n < 1 || !rows.is_array() || static_cast<long long>(rows.size()) != n) {
      throw Error(ErrorKind::InvalidInput, "\"d\" must be an n x n array");
    }
    Matrix d(n, n);
    for (long long i = 0; i < n; ++i) {
      const json& row = rows[i];
      if (!row.is_array() || static_cast<long long>(row.size()) != n) {
        throw Error(ErrorKind::InvalidInput, "row " + std::to_string(i + 1) + " of \"d\" must have n entries");
      }
      for (long long j = 0; j < n; ++j) {
        if (!row[j].is_number()) throw Error(ErrorKind::InvalidInput, "non-numeric entry in \"d\"");
        d(i, j) = row[j].get<double>();
      }
    }
    return d;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::InvalidInput, std::string("JSON: ") + ex.what());
  }
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json interval_json(const Interval& iv) { return {{"lo", iv.lo}, {"hi", iv.hi}}; }

json degenerate(ErrorKind kind) { return {{"degenerate", true}, {"error", std::string(to_string(kind))}}; }

std::string_view relation_name(ParallelRelation::Kind k) {
  switch (k) {
    case ParallelRelation::Kind::BothZero: return "both_zero";
    case ParallelRelation::Kind::Scalar: return "scalar";
    case ParallelRelation::Kind::NotParallel: return "not_parallel";
  }
  return "unknown";
}

std::string_view entry_case_name(EntryCase c) {
  switch (c) {
    case EntryCase::NotYielding: return "not_yielding";
    case EntryCase::TleqTrivial: return "tleq_trivial";
    case EntryCase::UnitWZero: return "unit_w_zero";
    case EntryCase::UnitGaleNonzero: return "unit_gale_nonzero";
    case EntryCase::RadiusFormula: return "radius_formula";
  }
  return "unknown";
}

json yielding_json(const YieldingReport& y) {
  json rel = {{"kind", relation_name(y.gale_relation.kind)}};
  if (y.gale_relation.kind == ParallelRelation::Kind::Scalar) rel["c"] = y.gale_relation.c;
  json out = {{"yielding", y.yielding}, {"gale_relation", rel}, {"interval", interval_json(y.interval)}};
  out["theta_lower"] = y.theta_lower ? json(*y.theta_lower) : degenerate(ErrorKind::DegenerateDenominator);
  out["theta_upper"] = y.theta_upper ? json(*y.theta_upper) : degenerate(ErrorKind::DegenerateDenominator);
  if (y.theta_c) out["theta_c"] = *y.theta_c;
  return out;
}

json teq_json(const TeqSet& s) {
  json values = json::array();
  if (s.kind == TeqSet::Kind::Continuum) {
    values = {s.interval.lo, s.interval.hi};
  } else {
    for (double v : s.values) values.push_back(v);
  }
  return {{"kind", to_string(s.kind)}, {"values", values}};
}

json coefficients_json(const RadiusCoefficients& rc) {
  return {{"alpha1", rc.alpha1},           {"alpha2", rc.alpha2},
          {"beta1", rc.beta1},             {"beta2", rc.beta2},
          {"c", rc.c},                     {"w_l", rc.w_l},
          {"theta_lower", rc.theta_lower}, {"theta_upper", rc.theta_upper},
          {"theta_c", rc.theta_c},         {"coincident_root", rc.coincident_root},
          {"coincidence_gap", rc.coincidence_gap}};
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

json cross_check_json(const EdmProfile& prof, const PerturbationReport& rep) {
  const EntryIndex entry = rep.entry;
  const CayleyMengerView view = cm_build(prof.d, prof.tol);
  json out;
  out["cm_is_edm"] = cm_is_edm(view);
  out["cm_radius_sq"] = cm_radius_sq(view);
  out["cm_embedding_dim"] = cm_embedding_dim(view);
  out["cm_gale_columns"] = cm_gale(view).cols();

  const Matrix& bd = prof.b_dag.matrix();
  const double bkl = bd(entry.k, entry.l);
  const GPolynomial gp = cm_g_polynomial(view, entry);
  out["g_polynomial_cm"] = {gp.c0, gp.c1, gp.c2};
  out["g_polynomial_bdag"] = {1.0, -bkl, (bkl * bkl - bd(entry.k, entry.k) * bd(entry.l, entry.l)) / 4.0};

  // Sample the interior of T<= and compare every available route.
  const Interval tl = rep.t_leq;
  std::vector<double> ts;
  if (tl.width() > 0.0) {
    for (int i = 0; i < 20; ++i) ts.push_back(tl.lo + (i + 0.5) / 20.0 * tl.width());
  } else {
    ts.push_back(0.0);
  }
  double max_direct = 0.0;
  double max_cm = 0.0;
  for (double t : ts) {
    const double closed = radius_squared(prof, entry, t);
    const std::optional<double> direct = direct_radius_sq(prof.d.perturbed(entry, t), prof.tol);
    max_direct = std::max(max_direct, direct ? rel_gap(closed, *direct) : 1.0);
    if (rep.coefficients) max_cm = std::max(max_cm, rel_gap(closed, 1.0 - 0.5 * cm_w_inner(prof, entry, t)));
  }
  out["samples"] = ts.size();
  out["max_rel_discrepancy_direct"] = max_direct;
  if (rep.coefficients) out["max_rel_discrepancy_cm"] = max_cm;
  return out;
}

}  // namespace

Matrix parse_matrix(std::string_view text) {
  const std::string_view body = trim(text.substr(std::min(text.size(), text.find_first_not_of(" \t\r\n"))));
  if (!body.empty() && body.front() == '{') return parse_json(body);
  return parse_csv(text);
}

Matrix read_matrix(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return parse_matrix(text);
}

std::string to_csv(const Matrix& d, const std::vector<std::string>& comments) {
  std::string out;
  for (const std::string& c : comments) out += "# " + c + "\n";
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (j) out += ',';
      out += fmt17(d(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Matrix& d, const json& meta) {
  json doc;
  doc["n"] = d.rows();
  json rows = json::array();
  for (Eigen::Index i = 0; i < d.rows(); ++i) rows.push_back(vec_json(d.row(i).transpose()));
  doc["d"] = rows;
  if (!meta.is_null()) doc["meta"] = meta;
  return dump(doc);
}

json tolerances_json(const TolerancePolicy& tol) {
  return {{"rank_rel", tol.rank_rel},
          {"psd_abs_scale", tol.psd_abs_scale},
          {"recon_rel", tol.recon_rel},
          {"parallel_rel", tol.parallel_rel}};
}

json profile_json(const EdmProfile& prof) {
  const int n = prof.n();
  json out = {{"n", n},
              {"r", prof.r},
              {"spherical", prof.spherical},
              {"unit_spherical", prof.unit_spherical},
              {"regular", prof.regular},
              {"w", vec_json(prof.w)},
              {"e_dot_w", prof.e_dot_w()},
              {"gale_columns", prof.z ? prof.z->cols() : 0},
              {"gale_rows", n}};
  out["radius"] = prof.radius ? json(*prof.radius) : json(nullptr);
  out["center"] = prof.center ? vec_json(*prof.center) : json(nullptr);
  return out;
}

json analyze_report(const EdmProfile& prof) {
  json warnings = json::array();
  if (!prof.spherical) warnings.push_back("matrix is not spherical (e^T w <= 0)");
  return {{"schema_version", kSchemaVersion},
          {"profile", profile_json(prof)},
          {"diagnostics", {{"tolerances", tolerances_json(prof.tol)}, {"warnings", warnings}}}};
}

json entry_report(const EdmProfile& prof, EntryIndex entry) {
  const PerturbationReport rep = classify(prof, entry);
  json er = {{"entry", {{"k", entry.k + 1}, {"l", entry.l + 1}}},
             {"yielding", yielding_json(rep.yielding)},
             {"entry_case", entry_case_name(rep.entry_case)},
             {"case_tag", to_string(rep.case_tag)},
             {"t_leq", interval_json(rep.t_leq)},
             {"t_eq", teq_json(rep.t_eq)},
             {"cross_check", cross_check_json(prof, rep)}};
  er["coefficients"] = rep.coefficients ? coefficients_json(*rep.coefficients) : json(nullptr);
  json warnings = json::array();
  for (const std::string& w : rep.warnings) warnings.push_back(w);
  return {{"schema_version", kSchemaVersion},
          {"profile", profile_json(prof)},
          {"report", er},
          {"diagnostics", {{"tolerances", tolerances_json(prof.tol)}, {"warnings", warnings}}}};
}

std::string sweep_csv(const EdmProfile& prof, EntryIndex entry, int num, double margin) {
  if (num < 2) throw Error(ErrorKind::InvalidInput, "num must be >= 2");
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw Error(ErrorKind::InvalidInput, "margin must be finite and >= 0");
  const PerturbationReport rep = classify(prof, entry);
  const double lo = rep.yielding.interval.lo - margin;
  const double hi = rep.yielding.interval.hi + margin;
  std::vector<double> ts(num);
  for (int i = 0; i < num; ++i) ts[i] = i + 1 == num ? hi : lo + (hi - lo) * i / (num - 1);
  const std::vector<SweepRecord> recs = membership_scan(prof.d, entry, ts, prof.tol);

  std::string out = "t,is_edm,is_spherical,radius_sq_closed_form,radius_sq_oracle,in_t_leq,in_t_eq\n";
  auto flag = [](bool b) { return b ? "true" : "false"; };
  for (const SweepRecord& rec : recs) {
    std::string closed;
    try {
      closed = fmt17(radius_squared(prof, entry, rec.t, true));
    } catch (const Error&) {
      // no closed form at this t (outside T<= for the unit cases, or at a pole)
    }
    out += fmt17(rec.t) + "," + flag(rec.is_edm) + "," + flag(rec.is_spherical) + "," + closed + "," +
           (rec.radius_sq ? fmt17(*rec.radius_sq) : std::string()) + "," + flag(rec.in_t_leq) + "," +
           flag(rec.in_t_eq) + "\n";
  }
  return out;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace edmp::io

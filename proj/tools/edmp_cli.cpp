// edmp: analyze unit spherical distance matrices from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "edmp/errors.hpp"
#include "edmp/io.hpp"
#include "edmp/oracle.hpp"
#include "edmp/verify.hpp"

using namespace edmp;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNotEdm = 3, kNotUnit = 4, kRange = 5, kInfeasible = 6 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return kUsage;
    case ErrorKind::NotAnEdm: return kNotEdm;
    case ErrorKind::NotUnitSpherical: return kNotUnit;
    case ErrorKind::IndexOutOfRange: return kRange;
    case ErrorKind::InfeasibleSpec: return kInfeasible;
    default: return kVerifyFailed;
  }
}

EdmProfile load(const std::string& path, bool need_unit) {
  const DistanceMatrix d = DistanceMatrix::from_matrix(io::read_matrix(path));
  EdmProfile prof = profile(d, TolerancePolicy::from_env());
  if (need_unit && !prof.unit_spherical) {
    throw Error(ErrorKind::NotUnitSpherical, "2 e^T w = " + std::to_string(2.0 * prof.e_dot_w()) + ", expected 1");
  }
  return prof;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbation analysis of unit spherical Euclidean distance matrices"};
  app.require_subcommand(1);

  std::string file;
  int k = 0;
  int l = 0;

  auto* analyze = app.add_subcommand("analyze", "Profile of a distance matrix (CSV or JSON, '-' for stdin)");
  analyze->add_option("file", file)->required();

  auto* entry = app.add_subcommand("entry", "Yielding interval, T<=, T= and radius formula for entry (k, l)");
  entry->add_option("file", file)->required();
  entry->add_option("--k", k, "row, 1-based")->required();
  entry->add_option("--l", l, "column, 1-based")->required();

  int num = 101;
  double margin = 0.5;
  auto* sweep = app.add_subcommand("sweep", "CSV table of membership and radii over the yielding interval");
  sweep->add_option("file", file)->required();
  sweep->add_option("--k", k)->required();
  sweep->add_option("--l", l)->required();
  sweep->add_option("--num", num)->check(CLI::Range(2, 1000000));
  sweep->add_option("--margin", margin)->check(CLI::NonNegativeNumber);

  VerifyOptions vopt;
  auto* verify = app.add_subcommand("verify", "Randomized invariant suite");
  verify->add_option("--count", vopt.count)->check(CLI::PositiveNumber);
  verify->add_option("--seed", vopt.seed);
  verify->add_option("--nmax", vopt.nmax)->check(CLI::Range(3, 64));
  verify->add_option("--threads", vopt.threads)->check(CLI::NonNegativeNumber);
  std::size_t show_failures = 1;
  verify->add_option("--show-failures", show_failures, "number of failures to print");
  verify->add_flag("--corrupt", vopt.corrupt, "negative control: corrupt the first instance");

  InstanceSpec spec;
  std::string structure = "generic";
  std::string format = "csv";
  int gk = 1;
  int gl = 2;
  auto* gen = app.add_subcommand("gen", "Generate a unit spherical EDM");
  gen->add_option("--n", spec.n)->required();
  gen->add_option("--r", spec.r)->required();
  gen->add_option("--structure", structure)->check(CLI::IsMember({"generic", "parallel-gale", "zero-gale", "mirror"}));
  gen->add_option("--k", gk);
  gen->add_option("--l", gl);
  gen->add_option("--seed", spec.seed);
  gen->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) {
      std::cout << io::dump(io::analyze_report(load(file, false)));
    } else if (*entry) {
      const EdmProfile prof = load(file, true);
      std::cout << io::dump(io::entry_report(prof, EntryIndex::one_based(k, l, prof.n())));
    } else if (*sweep) {
      const EdmProfile prof = load(file, true);
      std::cout << io::sweep_csv(prof, EntryIndex::one_based(k, l, prof.n()), num, margin);
    } else if (*verify) {
      const VerifySummary s = run_verify(vopt);
      std::cout << "instances: " << s.instances << "\n"
                << "checks: " << s.checks_run << " run, " << s.checks_failed << " failed\n";
      for (const auto& [name, t] : s.by_check) {
        std::cout << "  " << name << ": " << t.run - t.failed << "/" << t.run << "\n";
      }
      std::cout << "case coverage (designated entries):";
      for (const auto& [tag, c] : s.case_counts) std::cout << " " << tag << "=" << c;
      std::cout << "\n";
      if (s.coverage_enforced && !s.coverage_ok) {
        std::cout << "coverage: FAILED (need " << kCoveragePerTag << " instances per case tag)\n";
      }
      for (std::size_t i = 0; i < s.failures.size() && i < show_failures; ++i) {
        const CheckFailure& f = s.failures[i];
        std::cout << (i == 0 ? "first failure" : "failure") << ": instance " << f.instance << " seed " << f.seed
                  << " check " << f.check << ": " << f.detail << "\n";
      }
      std::cout << (s.passed() ? "PASS" : "FAIL") << "\n";
      return s.passed() ? kOk : kVerifyFailed;
    } else if (*gen) {
      spec.structure = *parse_structure(structure);
      if (spec.structure != Structure::Generic) spec.pair = EntryIndex::one_based(gk, gl, spec.n);
      const DistanceMatrix d = gen_unit_spherical(spec);
      const std::string seed = std::to_string(spec.seed);
      if (format == "json") {
        io::json meta = {{"n", spec.n}, {"r", spec.r}, {"structure", structure}, {"seed", spec.seed}};
        if (spec.structure != Structure::Generic) meta["pair"] = {spec.pair.k + 1, spec.pair.l + 1};
        std::cout << io::to_json(d.matrix(), meta);
      } else {
        std::string header = "edmp gen n=" + std::to_string(spec.n) + " r=" + std::to_string(spec.r) +
                             " structure=" + structure;
        if (spec.structure != Structure::Generic) {
          header += " k=" + std::to_string(spec.pair.k + 1) + " l=" + std::to_string(spec.pair.l + 1);
        }
        std::cout << io::to_csv(d.matrix(), {header + " seed=" + seed});
      }
    }
  } catch (const Error& err) {
    std::cerr << "edmp: " << err.what() << "\n";
    return exit_code(err.kind());
  } catch (const std::exception& ex) {
    std::cerr << "edmp: " << ex.what() << "\n";
    return kVerifyFailed;
  }
  return kOk;
}

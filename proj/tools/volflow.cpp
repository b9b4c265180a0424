#include <cmath>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "volflow/fig8.hpp"
#include "volflow/forms.hpp"
#include "volflow/io.hpp"
#include "volflow/suites.hpp"
#include "volflow/variation.hpp"

// Batch entry point.  Exit codes: 0 pass, 1 check failure, 2 usage or schema
// error, 3 solver failure.

namespace {

using namespace volflow;

std::vector<int> parse_sizes(const std::string& spec) {
  // "3" or "2..5"
  auto dots = spec.find("..");
  try {
    if (dots == std::string::npos) {
      int n = std::stoi(spec);
      if (n < 2) throw std::invalid_argument("n must be >= 2");
      return {n};
    }
    int lo = std::stoi(spec.substr(0, dots));
    int hi = std::stoi(spec.substr(dots + 2));
    if (lo < 2 || hi < lo) throw std::invalid_argument("bad range");
    std::vector<int> out;
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  } catch (const std::exception&) {
    throw SchemaError("--n: expected an integer >= 2 or a range like 2..5, got '" + spec + "'");
  }
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file(out_path, content);
}

int cmd_verify(const std::string& nspec, int trials, std::uint64_t seed, double tol,
               const std::string& output, const std::string& format) {
  SuiteOptions opts;
  opts.sizes = parse_sizes(nspec);
  opts.trials = trials;
  opts.seed = seed;
  if (tol > 0) opts.tol_override = tol;
  opts.threads = env_thread_cap();
  auto results = run_verify_suite(opts);
  std::cout << suite_to_text(results);
  if (!output.empty())
    write_file(output, format == "csv" ? suite_to_csv(results) : suite_to_json(results));
  bool ok = all_pass(results);
  std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return ok ? 0 : 1;
}

int cmd_rate(const std::string& input, const std::string& output, const std::string& format) {
  if (input.empty()) throw SchemaError("rate: --input is required");
  JetFile jf = parse_jet_file(read_file(input));
  double total = 0.0, total_zeta = 0.0;
  std::vector<double> per_cusp;
  for (const auto& jet : jf.cusps) {
    std::array<CuspJet, 1> one = {jet};
    double r = volume_rate(one);
    per_cusp.push_back(r);
    total += r;
    total_zeta += volume_rate_via_zeta(one);
  }
  double diff = std::abs(total - total_zeta);
  std::cout << std::setprecision(15);
  for (std::size_t i = 0; i < per_cusp.size(); ++i)
    std::cout << "cusp[" << i << "] rate = " << per_cusp[i] << "\n";
  std::cout << "total rate        = " << total << "\n";
  std::cout << "boundary-cocycle  = " << total_zeta << "\n";
  std::cout << "path difference   = " << diff << "\n";
  if (!output.empty()) {
    if (format == "csv") {
      std::ostringstream os;
      os << "cusp,rate\n" << std::setprecision(17);
      for (std::size_t i = 0; i < per_cusp.size(); ++i) os << i << ',' << per_cusp[i] << '\n';
      os << "total," << total << '\n';
      write_file(output, os.str());
    } else {
      nlohmann::json doc = {{"per_cusp", per_cusp},
                            {"total", total},
                            {"total_zeta_path", total_zeta},
                            {"difference", diff}};
      write_file(output, doc.dump(2));
    }
  }
  if (diff >= 1e-12) {
    std::cerr << "rate: dual-path consistency violated (diff = " << diff << ")\n";
    return 1;
  }
  return 0;
}

int cmd_fig8(const std::string& input, double u0_re, double u0_im, int samples,
             const std::string& kind, const std::string& output, const std::string& format) {
  PathSpec path;
  if (!input.empty()) {
    path = parse_path_spec(read_file(input));
  } else {
    path.u0 = Cplx(u0_re, u0_im);
    path.samples = samples;
    if (kind == "radial")
      path.kind = PathSpec::Kind::radial;
    else if (kind == "circle")
      path.kind = PathSpec::Kind::circle;
    else
      throw SchemaError("fig8: --kind must be radial or circle (or use --input)");
  }
  DeformationReport rep = deformation_experiment(path);
  std::cout << std::setprecision(12);
  std::cout << "samples            = " << rep.rows.size() << "\n";
  std::cout << "integral of rate   = " << rep.integral_rate << "\n";
  std::cout << "s_nz * Im(u~ v)/4  = " << rep.q_nz << "\n";
  std::cout << "discrepancy        = " << rep.nz_discrepancy << "\n";
  if (rep.decay) {
    std::cout << "quartic-decay radii:  ";
    for (double r : rep.decay->radii) std::cout << r << " ";
    std::cout << "\nquartic-decay errors: ";
    for (double e : rep.decay->errors) std::cout << e << " ";
    std::cout << "\nlog-log slope       = " << rep.decay->slope << "\n";
  }
  if (output.empty()) {
    std::cout << (format == "json" ? report_to_json(rep) : report_to_csv(rep));
  } else {
    // the report is written in both formats next to each other
    std::string base = output;
    for (const char* ext : {".csv", ".json"})
      if (base.size() > std::strlen(ext) && base.ends_with(ext))
        base = base.substr(0, base.size() - std::strlen(ext));
    write_file(base + ".csv", report_to_csv(rep));
    write_file(base + ".json", report_to_json(rep));
  }
  return 0;
}

int cmd_compare(const std::string& nspec, int trials, std::uint64_t seed) {
  std::vector<int> sizes = parse_sizes(nspec);
  std::cout << "calibrated signs: s_dgg = " << kDggSign << ", s_bfg = " << kBfgSign << "\n";
  if (calibrate_dgg_sign() != kDggSign || calibrate_bfg_sign() != kBfgSign) {
    std::cerr << "compare: stored calibration signs disagree with reference jets\n";
    return 1;
  }
  bool ok = true;
  const double tol = 1e-10;
  for (int n : sizes) {
    double worst_dgg = 0, worst_bfg = 0, worst_hodgson = 0;
    for (int t = 0; t < trials; ++t) {
      std::uint64_t s = sub_seed(seed, 77, n, t);
      CuspJet jet(random_borel(n, sub_seed(s, 0)), random_borel(n, sub_seed(s, 1)),
                  random_borel(n, sub_seed(s, 2)), random_borel(n, sub_seed(s, 3)));
      std::array<CuspJet, 1> jets = {jet};
      double rate = volume_rate(jets);
      double g = dgg_rate(n, dgg_coords(jet));
      if (std::abs(rate) > 1e-6 && g / (kDggSign * rate) < 0) {
        std::cerr << "compare: dgg sign flip at n=" << n << " trial " << t << "\n";
        return 1;
      }
      worst_dgg = std::max(worst_dgg, std::abs(g - kDggSign * rate));
      if (n == 3) {
        double b = 4.0 * bfg_rate(bfg_coords(jet));
        if (std::abs(rate) > 1e-6 && b / (kBfgSign * rate) < 0) {
          std::cerr << "compare: bfg sign flip at n=3 trial " << t << "\n";
          return 1;
        }
        worst_bfg = std::max(worst_bfg, std::abs(b - kBfgSign * rate));
      }
      if (n == 2) {
        std::mt19937_64 rng(sub_seed(s, 4));
        std::normal_distribution<double> gauss;
        HodgsonData d{gauss(rng), gauss(rng), gauss(rng), gauss(rng),
                      gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
        std::array<CuspJet, 1> hj = {hodgson_jet(d)};
        std::array<HodgsonData, 1> hd = {d};
        worst_hodgson = std::max(worst_hodgson, std::abs(volume_rate(hj) - hodgson_rate(hd)));
      }
    }
    std::cout << "n=" << n << "  max|dgg - s*rate| = " << std::setprecision(4)
              << std::scientific << worst_dgg;
    if (n == 3) std::cout << "  max|4*bfg - s*rate| = " << worst_bfg;
    if (n == 2) std::cout << "  max|hodgson - rate| = " << worst_hodgson;
    std::cout << std::defaultfloat << "\n";
    ok = ok && worst_dgg < tol && worst_bfg < tol && worst_hodgson < 1e-12;
  }
  std::cout << (ok ? "compare: all comparisons within tolerance\n"
                   : "compare: tolerance exceeded\n");
  return ok ? 0 : 1;
}

int cmd_veronese(const std::string& nspec) {
  std::vector<int> sizes = parse_sizes(nspec);
  for (int n : sizes) {
    std::cout << "n = " << n << "\n";
    CMat h = CMat::Zero(2, 2), e = CMat::Zero(2, 2), f = CMat::Zero(2, 2);
    h(0, 0) = 1;
    h(1, 1) = -1;
    e(0, 1) = 1;
    f(1, 0) = 1;
    auto print = [n](const char* label, const CMat& m) {
      std::cout << "  sigma(" << label << ") =\n";
      for (int i = 0; i < n; ++i) {
        std::cout << "    ";
        for (int j = 0; j < n; ++j) {
          Cplx z = m(i, j);
          if (z.imag() == 0)
            std::cout << std::setw(8) << z.real() << " ";
          else
            std::cout << std::setw(8) << z << " ";
        }
        std::cout << "\n";
      }
    };
    print("diag(1,-1)", veronese_algebra(n, SlElement(h)).mat());
    print("upper nilpotent", veronese_algebra(n, SlElement(e)).mat());
    print("lower nilpotent", veronese_algebra(n, SlElement(f)).mat());

    long long c3 = static_cast<long long>(n + 1) * n * (n - 1) / 6;
    long long sum_sq = 0, sum_prod = 0;
    for (int k = 0; k < n; ++k) sum_sq += static_cast<long long>(n - 1 - 2 * k) * (n - 1 - 2 * k);
    for (int k = 1; k <= n - 1; ++k) sum_prod += static_cast<long long>(k) * (n - k);
    std::cout << "  binomial(n+1,3) = " << c3 << ", sum of squared weights = " << sum_sq
              << " (expect " << 2 * c3 << "), sum of ladder products = " << sum_prod << "\n";
    SlElement x = random_sl(2, 5), y = random_sl(2, 6);
    Cplx lhs = (veronese_algebra(n, x).mat() * veronese_algebra(n, y).mat()).trace();
    Cplx rhs = static_cast<double>(c3) * (x.mat() * y.mat()).trace();
    std::cout << "  trace identity residual on a random pair: " << std::abs(lhs - rhs) << "\n";
    if (sum_sq != 2 * c3 || sum_prod != c3) {
      std::cerr << "veronese: integer identities failed\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"volflow: volume-variation formulas for boundary holonomy data"};
  app.require_subcommand(1);

  std::string nspec = "2..5", input, output, format = "json", kind = "radial";
  int trials = 200, samples = 33;
  std::uint64_t seed = 0;
  double tol = -1.0, u0_re = 0.1, u0_im = 0.05;

  auto add_common = [&](CLI::App* sub, bool with_trials) {
    sub->add_option("--n", nspec, "size n or range lo..hi");
    if (with_trials) sub->add_option("--trials", trials, "randomized trials per check");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--tol", tol, "tolerance override");
    sub->add_option("--input", input, "input path");
    sub->add_option("--output", output, "output path");
    sub->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* verify = app.add_subcommand("verify", "run the verification suites");
  add_common(verify, true);
  CLI::App* rate = app.add_subcommand("rate", "evaluate the rate formula on a jet file");
  add_common(rate, false);
  CLI::App* fig8 = app.add_subcommand("fig8", "figure-eight deformation experiment");
  add_common(fig8, false);
  fig8->add_option("--u0-re", u0_re, "radial/circle path endpoint, real part");
  fig8->add_option("--u0-im", u0_im, "radial/circle path endpoint, imaginary part");
  fig8->add_option("--samples", samples, "sample count (odd, >= 9)");
  fig8->add_option("--kind", kind, "radial|circle")->check(CLI::IsMember({"radial", "circle"}));
  CLI::App* compare = app.add_subcommand("compare", "cross-check rate formulas");
  add_common(compare, true);
  CLI::App* veronese = app.add_subcommand("veronese", "print symmetric-power matrices");
  add_common(veronese, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    if (app.got_subcommand(verify)) return cmd_verify(nspec, trials, seed, tol, output, format);
    if (app.got_subcommand(rate)) return cmd_rate(input, output, format);
    if (app.got_subcommand(fig8))
      return cmd_fig8(input, u0_re, u0_im, samples, kind, output, format);
    if (app.got_subcommand(compare)) return cmd_compare(nspec, trials, seed);
    if (app.got_subcommand(veronese)) return cmd_veronese(nspec);
  } catch (const volflow::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const volflow::Fig8SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

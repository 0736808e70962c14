#include "hlw/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hlw/exponents.hpp"
#include "hlw/lw.hpp"
#include "hlw/planar_ops.hpp"
#include "hlw/sobolev.hpp"

namespace hlw {

namespace {

constexpr double kBoxRatio = 0.93568928567124832;  // 8 / 25^(2/3)

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

GridFunction disk_indicator(int cells) {
  return sample_function(grid_geom_2d(-1.5, 1.5, -1.5, 1.5, cells, cells),
                         [](std::span<const double> p) {
                           return p[0] * p[0] + p[1] * p[1] <= 1.0 ? 1.0 : 0.0;
                         });
}

GridFunction gaussian_2d(int cells) {
  return sample_function(grid_geom_2d(-2.0, 2.0, -2.0, 2.0, cells, cells),
                         [](std::span<const double> p) {
                           return std::exp(-std::numbers::pi * (p[0] * p[0] + p[1] * p[1]));
                         });
}

GridFunction smooth_bump_2d(int cells) {
  return sample_function(grid_geom_2d(-1.2, 1.2, -1.2, 1.2, cells, cells),
                         [](std::span<const double> p) {
                           const double r2 = p[0] * p[0] + p[1] * p[1];
                           return std::pow(std::max(0.0, 1.0 - r2), 3.0);
                         });
}

SampledFunction smooth_bump_3d(int cells) {
  Box box;
  box.lo = {-1.2, -1.2, -1.2};
  box.hi = {1.2, 1.2, 1.2};
  return sample_compact_function(HDim{1}, box, cells, 2, [](std::span<const double> p) {
    const double r2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 1.44;
    return 1.5 * std::pow(std::max(0.0, 1.0 - r2), 3.0);
  });
}

// --------------------------------------------------------------------------

CriterionResult c1_box_sharpness(bool quick) {
  CriterionResult cr{"C1", "H1 box ratio 8/25^(2/3) within 3% and r-invariant within 1%", false,
                     "", 0};
  const int res = quick ? 96 : 256;
  const HDim dim{1};
  RatioReport unit = lw_ratio(sharp_box_region(1.0, dim), dim, res);
  const std::vector<double> rs{0.5, 1.0, 2.0};
  SharpnessTable sweep = sharpness_sweep(dim, rs, res);
  const double err = rel_diff(unit.value, kBoxRatio);
  cr.pass = err <= 0.03 && sweep.spread <= 0.01;
  cr.detail = "value=" + fmt(unit.value) + " target=" + fmt(kBoxRatio) + " err=" + fmt(err) +
              " sweep_spread=" + fmt(sweep.spread) + " res=" + fmt(res);
  return cr;
}

CriterionResult c2_euclidean_counterexample(bool quick) {
  CriterionResult cr{"C2", "flat projections force lambda_max=1/2, lambda_min=3/4 exactly", false,
                     "", 0};
  const int res = quick ? 64 : 128;
  CounterexampleResult out = euclidean_counterexample(0.01, 10.0, res);
  const double e1 = std::abs(out.lambda_max - 0.5);
  const double e2 = std::abs(out.lambda_min - 0.75);
  cr.pass = e1 <= 1e-12 && e2 <= 1e-12;
  cr.detail = "lambda_max=" + fmt(out.lambda_max) + " lambda_min=" + fmt(out.lambda_min) +
              " heis_proj/R^3=" + fmt(out.heis_proj1_large / 1000.0);
  return cr;
}

CriterionResult c3_exponent_tables(bool) {
  CriterionResult cr{"C3", "exponent identities exact for n in 1..6", false, "", 0};
  bool ok = true;
  for (int n = 1; n <= 6; ++n) {
    ExponentTable table = exponent_table(HDim{n});
    ok = ok && table.identities_hold();
    if (n == 1) ok = ok && table.p_main == Rat(3, 2);
    if (n == 2)
      ok = ok && table.p_main == Rat(10, 3) && table.q_dual == Rat(10, 7) &&
           table.q_k[0] == Rat(5, 4) && table.q_k[1] == Rat(5, 3);
  }
  cr.pass = ok;
  cr.detail = ok ? "all rational identities hold" : "identity failure";
  return cr;
}

CriterionResult c4_radon_oracle(bool quick) {
  CriterionResult cr{"C4", "R(chi_disk)(.,0)=2 within 2%; ||Tf||_3 <= ||Rf||_3 + 3%", false, "",
                     0};
  const int cells = quick ? 96 : 160;
  const int n_angles = quick ? 60 : 120;
  const int n_offsets = quick ? 128 : 256;
  GridFunction disk = disk_indicator(cells);
  Sinogram sino = radon_transform(disk, n_angles, n_offsets, 512);

  // Rf(sigma, 0): interpolate the two offset samples bracketing s = 0.
  double worst = 0.0;
  for (size_t ia = 0; ia < sino.angles.size(); ++ia) {
    const double u = (0.0 - sino.offset_min) / sino.offset_step;
    const std::int64_t i0 = static_cast<std::int64_t>(std::floor(u));
    const double f = u - static_cast<double>(i0);
    const double rv = (1 - f) * sino.at(ia, i0) + f * sino.at(ia, i0 + 1);
    worst = std::max(worst, std::abs(rv - 2.0) / 2.0);
  }

  bool chain_ok = true;
  std::ostringstream chain;
  ImprovingOptions opts;
  opts.spacing_scale = quick ? 2.0 : 1.5;
  std::vector<std::pair<std::string, GridFunction>> inputs;
  inputs.emplace_back("disk", disk);
  inputs.emplace_back("gauss", gaussian_2d(cells));
  for (auto& [name, f] : inputs) {
    const double tf = improving_ratio(make_op_T(), f, opts) * lp_norm(f, 1.5);
    const double rf = lp_norm(radon_transform(f, n_angles, n_offsets, 512), 3.0);
    chain << name << ":T=" << fmt(tf) << ",R=" << fmt(rf) << " ";
    chain_ok = chain_ok && tf <= rf * 1.03;
  }
  cr.pass = worst <= 0.02 && chain_ok;
  cr.detail = "chord_err=" + fmt(worst) + " " + chain.str();
  return cr;
}

CriterionResult c5_s_scaling(bool quick) {
  CriterionResult cr{"C5", "||S_b f||_3 |b|^{1/3} constant within 2%; alpha!=0 reduction within 3%",
                     false, "", 0};
  const int cells = quick ? 72 : 128;
  GridFunction disk = disk_indicator(cells);
  ImprovingOptions opts;
  opts.spacing_scale = quick ? 2.0 : 1.5;

  double lo = 0.0, hi = 0.0;
  std::ostringstream detail;
  for (double beta : {1.0, 2.0, 4.0}) {
    SCoeffs c;
    c.beta = beta;
    const double norm =
        improving_ratio(make_op_S(c), disk, opts) * lp_norm(disk, 1.5) * std::cbrt(beta);
    detail << "b" << beta << "=" << fmt(norm) << " ";
    if (lo == 0.0 || norm < lo) lo = norm;
    hi = std::max(hi, norm);
  }
  const bool scaling_ok = hi / lo - 1.0 <= 0.02;

  // alpha != 0: Sf = |a|^{-1/3} (mu_{-a} * f)(Phi(x,t)) pointwise.
  GridFunction bump = smooth_bump_2d(cells);
  SCoeffs c;
  c.alpha = 1.0;
  c.beta = 1.0;
  c.gamma = 0.3;
  c.delta = 0.2;
  c.epsilon = 0.1;
  c.kappa = 0.05;
  const GridGeom out_spec = grid_geom_2d(-1.0, 1.0, -1.5, 2.5, cells, 2 * cells);
  GridFunction sf = op_S(bump, c, out_spec);

  // The pullback needs mu_{-alpha} * f on a grid covering Phi(out window).
  const GridGeom conv_spec = grid_geom_2d(-2.5, 2.5, -3.5, 3.5, 4 * cells, 6 * cells);
  GridFunction conv = parabola_convolution(bump, -c.alpha, conv_spec);
  const double scale = std::pow(std::abs(c.alpha), -1.0 / 3.0);
  double worst = 0.0;
  const double floor = 0.05 * sf.abs_max();
  const std::int64_t nt = out_spec.shape[1];
  for (std::int64_t li = 0; li < sf.size(); ++li) {
    const double x = out_spec.center(0, li / nt);
    const double t = out_spec.center(1, li % nt);
    const double u = c.beta / c.alpha * x + c.epsilon / c.alpha;
    const double phi_x = -0.5 * u;
    const double phi_t = -c.alpha / 4.0 * u * u + c.gamma * x * x + c.delta * x + c.kappa + t;
    const double expected = scale * conv.value2(phi_x, phi_t);
    if (sf[li] > floor || expected > floor)
      worst = std::max(worst, std::abs(sf[li] - expected) / std::max(sf[li], expected));
  }
  const bool reduction_ok = worst <= 0.03;
  cr.pass = scaling_ok && reduction_ok;
  cr.detail = detail.str() + "spread=" + fmt(hi / lo - 1.0) + " reduction_err=" + fmt(worst);
  return cr;
}

CriterionResult c6_pairing(bool quick) {
  CriterionResult cr{"C6", "pairing identity within 2% at 128^3, error halving under refinement",
                     false, "", 0};
  const int res = quick ? 64 : 128;
  const GridGeom geom = grid_geom_2d(-0.2, 1.4, -0.4, 1.2, quick ? 96 : 160, quick ? 96 : 160);
  GridFunction f1 = sample_function(geom, [](std::span<const double> p) {
    return p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0 ? 1.0 : 0.0;
  });
  GridFunction f2 = sample_function(geom, [](std::span<const double> p) {
    return p[0] >= 0.3089 && p[0] <= 1.3089 && p[1] >= -0.2117 && p[1] <= 0.7883 ? 1.0 : 0.0;
  });
  PairingResult coarse = pairing_check(f1, f2, res / 2);
  PairingResult fine = pairing_check(f1, f2, res);
  const double halving = coarse.relative_error > 0.0
                             ? fine.relative_error / coarse.relative_error
                             : 0.0;
  cr.pass = fine.relative_error <= 0.02 && halving >= 0.25 && halving <= 0.75;
  cr.detail = "err@" + fmt(res) + "=" + fmt(fine.relative_error) + " err@" + fmt(res / 2) + "=" +
              fmt(coarse.relative_error) + " halving=" + fmt(halving);
  return cr;
}

CriterionResult c7_invariance(bool quick) {
  CriterionResult cr{"C7", "lw/sobolev/isoperimetric ratios invariant under translations+dilations",
                     false, "", 0};
  const HDim dim{1};
  std::ostringstream detail;

  // Deterministic "random" translations.
  std::vector<HPoint> translations = {HPoint{{0.31, -0.22}, 0.17}, HPoint{{-0.45, 0.11}, -0.09},
                                      HPoint{{0.12, 0.38}, 0.25}, HPoint{{-0.27, -0.33}, 0.05},
                                      HPoint{{0.41, 0.07}, -0.19}};
  if (quick) translations.resize(2);
  const std::vector<double> dilations{0.5, 2.0};

  const int lw_res = quick ? 64 : 128;
  InvarianceReport lw_report = invariance_suite(sharp_box_region(1.0, dim), dim, translations,
                                                dilations, lw_res, 0.02);
  detail << "lw_max=" << fmt(lw_report.max_rel_change) << " ";

  // Sobolev ratio under u -> u(p^{-1} . q) and u(delta_{1/r} q).
  const int sres = quick ? 40 : 64;
  auto bump_fn = [](std::span<const double> p) {
    const double r2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 1.44;
    return std::pow(std::max(0.0, 1.0 - r2), 3.0);
  };
  Box bump_box;
  bump_box.lo = {-1.2, -1.2, -1.2};
  bump_box.hi = {1.2, 1.2, 1.2};
  const double sob_base =
      sobolev_ratio(sample_compact_function(dim, bump_box, sres, 2, bump_fn), dim).value;
  double sob_max = 0.0;
  for (const HPoint& p : translations) {
    Region shell = box_region(bump_box, "bump_support");
    Region moved = translate_region(shell, p, dim);
    const HPoint pinv = group_inverse(p);
    auto moved_fn = [&, pinv](std::span<const double> q) {
      HPoint s = hpoint_from_coords(q);
      HPoint back = group_product(pinv, s, dim);
      std::vector<double> coords(q.size());
      hpoint_to_coords(back, coords);
      return bump_fn(coords);
    };
    const double value =
        sobolev_ratio(sample_compact_function(dim, moved.bounds, sres, 2, moved_fn), dim).value;
    sob_max = std::max(sob_max, rel_diff(value, sob_base));
  }
  for (double r : dilations) {
    Box scaled = bump_box;
    for (int a = 0; a < 2; ++a) {
      scaled.lo[a] *= r;
      scaled.hi[a] *= r;
    }
    scaled.lo[2] *= r * r;
    scaled.hi[2] *= r * r;
    auto scaled_fn = [&, r](std::span<const double> q) {
      const double back[3] = {q[0] / r, q[1] / r, q[2] / (r * r)};
      return bump_fn(std::span<const double>(back, 3));
    };
    const double value =
        sobolev_ratio(sample_compact_function(dim, scaled, sres, 2, scaled_fn), dim).value;
    sob_max = std::max(sob_max, rel_diff(value, sob_base));
  }
  detail << "sobolev_max=" << fmt(sob_max) << " ";

  // Isoperimetric ratio over a Euclidean ball.
  const int ires = quick ? 48 : 80;
  Region ball = euclidean_ball_region({0.0, 0.0, 0.0}, 1.0);
  const double iso_base = isoperimetric_ratio(ball, dim, ires).value;
  double iso_max = 0.0;
  const size_t iso_translations = quick ? 1 : 3;
  for (size_t i = 0; i < iso_translations; ++i) {
    const double value =
        isoperimetric_ratio(translate_region(ball, translations[i], dim), dim, ires).value;
    iso_max = std::max(iso_max, rel_diff(value, iso_base));
  }
  for (double r : dilations) {
    const double value = isoperimetric_ratio(dilate_region(ball, r, dim), dim, ires).value;
    iso_max = std::max(iso_max, rel_diff(value, iso_base));
  }
  detail << "iso_max=" << fmt(iso_max);

  cr.pass = lw_report.max_rel_change <= 0.02 && sob_max <= 0.02 && iso_max <= 0.05;
  cr.detail = detail.str();
  return cr;
}

CriterionResult c8_levelset_lemma(bool quick) {
  CriterionResult cr{"C8", "level-set lemma lhs <= 1.1 rhs for every resolved (j,k)", false, "", 0};
  const int res = quick ? 64 : 128;
  const HDim dim{1};
  SampledFunction u = smooth_bump_3d(res);
  std::vector<LemmaRow> rows = levelset_lemma_table(u, dim);
  double worst = 0.0;
  int checked = 0;
  // Levels whose F_{k-1} holds no sample are below the sampling floor; the
  // discrete rhs is blind there.
  for (const auto& row : rows) {
    if (row.check.fkm1_empty || row.check.rhs == 0.0) continue;
    ++checked;
    worst = std::max(worst, row.check.lhs / row.check.rhs);
  }
  cr.pass = checked > 0 && worst <= 1.1;
  cr.detail = "checked=" + fmt(checked) + " worst_lhs/rhs=" + fmt(worst);
  return cr;
}

CriterionResult c9_degeneracy(bool quick) {
  CriterionResult cr{"C9", "degenerate families flagged with exponent 1/3 +- 20%; standard bounded",
                     false, "", 0};
  const HDim dim{2};
  const int cells = quick ? 48 : 72;
  const std::vector<GridFunction> bank = standard_test_bank(cells, 2026);
  const std::vector<GridFunction> bank_fine = standard_test_bank(cells * 3 / 2, 2026);
  const std::vector<std::vector<double>> slices{{0.0, 0.0}, {0.4, -0.3}};
  const std::vector<double> windows{1.0, 2.0, 4.0};
  const double scale = quick ? 2.0 : 1.5;

  HeightFamily standard = standard_height_family(dim);
  L32L3Report bounded = l32l3_certificate(standard, slices, bank, windows, scale);
  L32L3Report bounded_fine = l32l3_certificate(standard, slices, bank_fine, windows, scale);
  const double constant_shift =
      rel_diff(bounded.empirical_constant, bounded_fine.empirical_constant);

  HeightFamily degen =
      poly_height_family(constant_poly_spec(dim, std::vector<double>{1.0, 0.5, 1.0, -0.5}));
  L32L3Report flagged = l32l3_certificate(degen, slices, bank, windows, scale);
  double degen_exponent = 0.0;
  bool degen_flagged = false;
  for (const auto& entry : flagged.entries)
    if (entry.k == 1) {
      degen_flagged = entry.degenerate;
      degen_exponent = entry.growth_exponent;
    }

  const bool standard_ok = !bounded.any_degenerate && constant_shift <= 0.10;
  const bool exponent_ok = std::abs(degen_exponent - 1.0 / 3.0) <= 0.2 / 3.0;
  cr.pass = standard_ok && degen_flagged && exponent_ok;
  cr.detail = "std_constant=" + fmt(bounded.empirical_constant) + " shift=" + fmt(constant_shift) +
              " degen_exponent=" + fmt(degen_exponent);
  return cr;
}

CriterionResult c10_h2_smoke(bool quick) {
  CriterionResult cr{"C10", "H2 unit-box ratio finite and dilation-invariant within 5%", false, "",
                     0};
  const HDim dim{2};
  const int res = quick ? 14 : 24;
  Region box = sharp_box_region(1.0, dim);
  RatioReport base = lw_ratio(box, dim, res);
  RatioReport dilated = lw_ratio(dilate_region(box, 2.0, dim), dim, res);
  const double change = rel_diff(dilated.value, base.value);
  cr.pass = std::isfinite(base.value) && base.value > 0.0 && change <= 0.05;
  cr.detail = "value=" + fmt(base.value) + " dilation_change=" + fmt(change);
  return cr;
}

CriterionResult c11_constant_stability(bool quick) {
  CriterionResult cr{"C11", "max conservative lw_ratio stable under 128->256 refinement", false,
                     "", 0};
  const HDim dim{1};
  const int res_lo = quick ? 64 : 128;
  const int res_hi = quick ? 128 : 256;
  double max_lo = 0.0, max_hi = 0.0;
  double width_hi = 0.0;
  for (const Region& region : builtin_region_suite()) {
    RatioReport lo = lw_ratio(region, dim, res_lo);
    RatioReport hi = lw_ratio(region, dim, res_hi);
    max_lo = std::max(max_lo, lo.conservative);
    if (hi.conservative > max_hi) {
      max_hi = hi.conservative;
      width_hi = hi.optimistic - hi.conservative;
    }
  }
  const double change = std::abs(max_hi - max_lo);
  cr.pass = change < width_hi;
  cr.detail = "max@" + fmt(res_lo) + "=" + fmt(max_lo) + " max@" + fmt(res_hi) + "=" + fmt(max_hi) +
              " change=" + fmt(change) + " bracket_width=" + fmt(width_hi);
  return cr;
}

}  // namespace

std::vector<std::string> acceptance_criterion_ids() {
  return {"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11"};
}

AcceptanceReport run_acceptance(bool quick, std::ostream* progress) {
  using Clock = std::chrono::steady_clock;
  std::vector<std::function<CriterionResult(bool)>> criteria = {
      c1_box_sharpness, c2_euclidean_counterexample, c3_exponent_tables, c4_radon_oracle,
      c5_s_scaling,     c6_pairing,                  c7_invariance,      c8_levelset_lemma,
      c9_degeneracy,    c10_h2_smoke,                c11_constant_stability};

  const std::vector<std::string> ids = acceptance_criterion_ids();
  AcceptanceReport report;
  report.all_pass = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    auto& criterion = criteria[i];
    const auto start = Clock::now();
    CriterionResult result;
    try {
      result = criterion(quick);
    } catch (const std::exception& ex) {
      result.pass = false;
      result.detail = std::string("exception: ") + ex.what();
      result.id = ids[i];
    }
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report.all_pass = report.all_pass && result.pass;
    report.total_seconds += result.seconds;
    if (progress) {
      (*progress) << (result.pass ? "PASS " : "FAIL ") << result.id << " [" << fmt(result.seconds)
                  << "s] " << result.description << " | " << result.detail << "\n";
      progress->flush();
    }
    report.results.push_back(std::move(result));
  }
  return report;
}

}  // namespace hlw

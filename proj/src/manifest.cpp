#include "hlw/manifest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "hlw/acceptance.hpp"
#include "hlw/exponents.hpp"
#include "hlw/lw.hpp"
#include "hlw/parallel.hpp"
#include "hlw/planar_ops.hpp"
#include "hlw/search.hpp"
#include "hlw/sobolev.hpp"

namespace hlw {

namespace {

using nlohmann::json;

struct CsvRow {
  std::string op;
  int n = 1;
  std::string params;
  int resolution = 0;
  double value = 0.0;
  double conservative = 0.0;
  double optimistic = 0.0;
  std::uint64_t seed = 0;
};

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_text(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os << "op,n,params,resolution,value,conservative,optimistic,seed\n";
  for (const auto& row : rows)
    os << row.op << ',' << row.n << ',' << row.params << ',' << row.resolution << ','
       << fmt_g(row.value) << ',' << fmt_g(row.conservative) << ',' << fmt_g(row.optimistic) << ','
       << row.seed << '\n';
  return os.str();
}

CsvRow row_from_report(const std::string& op, int n, std::string params, const RatioReport& report,
                       std::uint64_t seed) {
  CsvRow row;
  row.op = op;
  row.n = n;
  row.params = std::move(params);
  row.resolution = report.resolution;
  row.value = report.value;
  row.conservative = report.conservative;
  row.optimistic = report.optimistic;
  row.seed = seed;
  return row;
}

double param_double(const json& params, const std::string& key, double dflt) {
  if (!params.contains(key)) return dflt;
  const auto& v = params.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return std::stod(v.get<std::string>());
  throw std::invalid_argument("param " + key + " is not numeric");
}

int param_int(const json& params, const std::string& key, int dflt) {
  return static_cast<int>(std::llround(param_double(params, key, dflt)));
}

std::string param_str(const json& params, const std::string& key, const std::string& dflt) {
  if (!params.contains(key)) return dflt;
  const auto& v = params.at(key);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::vector<double> param_list(const json& params, const std::string& key,
                               std::vector<double> dflt) {
  if (!params.contains(key)) return dflt;
  const auto& v = params.at(key);
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& item : v) out.push_back(item.get<double>());
    return out;
  }
  std::string text = v.is_string() ? v.get<std::string>() : v.dump();
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ','))
    if (!piece.empty()) out.push_back(std::stod(piece));
  if (out.empty()) throw std::invalid_argument("param " + key + " is empty");
  return out;
}

Region region_from_params(const json& params, HDim dim) {
  const std::string kind = param_str(params, "region", "sharp-box");
  if (kind == "sharp-box") return sharp_box_region(param_double(params, "r", 1.0), dim);
  if (kind == "box") {
    std::vector<double> hw = param_list(params, "half_widths",
                                        std::vector<double>(dim.ambient(), 1.0));
    if (static_cast<int>(hw.size()) != dim.ambient())
      throw std::invalid_argument("box region needs 2n+1 half widths");
    Box box;
    for (double h : hw) {
      box.lo.push_back(-h);
      box.hi.push_back(h);
    }
    return box_region(box);
  }
  if (kind == "ball")
    return koranyi_ball_region(identity_point(dim), param_double(params, "radius", 1.0), dim);
  if (kind == "euclidean-ball")
    return euclidean_ball_region(std::vector<double>(dim.ambient(), 0.0),
                                 param_double(params, "radius", 1.0));
  if (kind == "union") {
    Box b1, b2;
    b1.lo = {-1.0, -0.5, -0.5};
    b1.hi = {0.2, 0.5, 0.5};
    b2.lo = {-0.2, -0.6, -0.4};
    b2.hi = {1.0, 0.6, 0.6};
    return union_region(box_region(b1, "boxA"), box_region(b2, "boxB"));
  }
  throw std::invalid_argument("unknown region kind: " + kind);
}

std::vector<GridFunction> strong_inputs(const json& params, int cells) {
  const std::string kind = param_str(params, "f", "squares");
  const GridGeom geom = grid_geom_2d(-0.5, 1.5, -0.5, 1.5, cells, cells);
  if (kind == "squares") {
    GridFunction square = sample_function(geom, [](std::span<const double> p) {
      return p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0 ? 1.0 : 0.0;
    });
    return {square, square};
  }
  if (kind == "gaussians") {
    GridFunction g = sample_function(geom, [](std::span<const double> p) {
      const double dx = p[0] - 0.5, dy = p[1] - 0.5;
      return std::exp(-8.0 * (dx * dx + dy * dy));
    });
    return {g, g};
  }
  throw std::invalid_argument("unknown input preset: " + kind);
}

HeightFamily family_from_params(const json& params, HDim dim) {
  const std::string kind = param_str(params, "family", "standard");
  if (kind == "standard") return standard_height_family(dim);
  if (kind == "degenerate") {
    std::vector<double> b(dim.horizontal(), 0.0);
    for (int k = 0; k < dim.n; ++k) {
      b[k] = 1.0;
      b[dim.n + k] = (k == 0) ? 1.0 : 0.0;  // first pair degenerate
    }
    return poly_height_family(constant_poly_spec(dim, std::move(b)));
  }
  if (kind.rfind("gap:", 0) == 0) {
    const double gap = std::stod(kind.substr(4));
    std::vector<double> b(dim.horizontal(), 0.0);
    for (int k = 0; k < dim.n; ++k) {
      b[k] = gap / 2.0;
      b[dim.n + k] = -gap / 2.0;
    }
    return poly_height_family(constant_poly_spec(dim, std::move(b)));
  }
  throw std::invalid_argument("unknown family: " + kind);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct RunOutput {
  std::vector<CsvRow> rows;
  bool inconclusive = false;
};

RunOutput run_lw_ratio(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  RunOutput out;
  Region region = region_from_params(man.params, dim);
  RatioReport report = lw_ratio(region, dim, man.resolution);
  out.rows.push_back(
      row_from_report("lw-ratio", dim.n, "region=" + region.label, report, man.seed));
  out.inconclusive = report.empty_region;
  return out;
}

RunOutput run_strong(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  RunOutput out;
  auto f = strong_inputs(man.params, param_int(man.params, "cells", 128));
  RatioReport report = strong_ratio(f, dim, man.resolution);
  out.rows.push_back(row_from_report("strong", dim.n, report.metadata, report, man.seed));
  return out;
}

RunOutput run_vertex(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  const int k = param_int(man.params, "k", 1);
  RunOutput out;
  auto f = strong_inputs(man.params, param_int(man.params, "cells", 128));
  RatioReport report = vertex_ratio(f, dim, k, man.resolution);
  out.rows.push_back(row_from_report("vertex", dim.n, report.metadata, report, man.seed));
  return out;
}

RunOutput run_sharpness(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  RunOutput out;
  const std::vector<double> rs = param_list(man.params, "r", {0.5, 1.0, 2.0});
  SharpnessTable table = sharpness_sweep(dim, rs, man.resolution);
  for (const auto& row : table.rows)
    out.rows.push_back(
        row_from_report("sharpness", dim.n, "r=" + fmt_g(row.r), row.report, man.seed));
  return out;
}

RunOutput run_euclid(const Manifest& man) {
  const double delta = param_double(man.params, "delta", 0.01);
  const double R = param_double(man.params, "R", 10.0);
  CounterexampleResult result = euclidean_counterexample(delta, R, man.resolution);
  RunOutput out;
  CsvRow row;
  row.op = "euclid-counterexample";
  row.n = 1;
  row.params = "delta=" + fmt_g(delta) + ";R=" + fmt_g(R);
  row.resolution = man.resolution;
  row.value = result.lambda_max;
  row.conservative = result.lambda_min;
  row.optimistic = result.heis_proj1_large / (R * R * R);
  row.seed = man.seed;
  out.rows.push_back(row);
  return out;
}

RunOutput run_radon_norm(const Manifest& man) {
  const int cells = param_int(man.params, "cells", 128);
  const int angles = param_int(man.params, "angles", 120);
  const int offsets = param_int(man.params, "offsets", 256);
  GridFunction disk = sample_function(grid_geom_2d(-1.5, 1.5, -1.5, 1.5, cells, cells),
                                      [](std::span<const double> p) {
                                        return p[0] * p[0] + p[1] * p[1] <= 1.0 ? 1.0 : 0.0;
                                      });
  const double rnorm = lp_norm(radon_transform(disk, angles, offsets), 3.0);
  const double ratio = improving_ratio_radon(disk, angles, offsets);
  RunOutput out;
  CsvRow row;
  row.op = "radon-norm";
  row.n = 1;
  row.params = "angles=" + std::to_string(angles) + ";offsets=" + std::to_string(offsets);
  row.resolution = cells;
  row.value = ratio;
  row.conservative = rnorm;
  row.optimistic = lp_norm(disk, 1.5);
  row.seed = man.seed;
  out.rows.push_back(row);
  return out;
}

RunOutput run_s_scaling(const Manifest& man) {
  const int cells = param_int(man.params, "cells", 96);
  const std::vector<double> betas = param_list(man.params, "beta", {1.0, 2.0, 4.0});
  GridFunction disk = sample_function(grid_geom_2d(-1.5, 1.5, -1.5, 1.5, cells, cells),
                                      [](std::span<const double> p) {
                                        return p[0] * p[0] + p[1] * p[1] <= 1.0 ? 1.0 : 0.0;
                                      });
  ImprovingOptions opts;
  opts.spacing_scale = 2.0;
  RunOutput out;
  for (double beta : betas) {
    SCoeffs c;
    c.beta = beta;
    const double ratio = improving_ratio(make_op_S(c), disk, opts);
    CsvRow row;
    row.op = "s-scaling";
    row.n = 1;
    row.params = "beta=" + fmt_g(beta);
    row.resolution = cells;
    row.value = ratio;
    row.conservative = ratio * std::cbrt(beta);  // scale-invariant form
    row.optimistic = ratio * std::cbrt(beta);
    row.seed = man.seed;
    out.rows.push_back(row);
  }
  return out;
}

RunOutput run_l32l3(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 2)};
  const int cells = param_int(man.params, "cells", 64);
  HeightFamily family = family_from_params(man.params, dim);
  const std::vector<double> windows = param_list(man.params, "windows", {1.0, 2.0, 4.0});
  std::vector<std::vector<double>> slices;
  if (dim.n > 1) slices = {std::vector<double>(2 * dim.n - 2, 0.0)};
  L32L3Report report =
      l32l3_certificate(family, slices, standard_test_bank(cells, man.seed), windows, 2.0);
  RunOutput out;
  for (const auto& entry : report.entries) {
    CsvRow row;
    row.op = entry.degenerate ? "l32l3:DEGENERATE" : "l32l3:BOUNDED";
    row.n = dim.n;
    row.params = "k=" + std::to_string(entry.k) + ";growth_exp=" + fmt_g(entry.growth_exponent);
    row.resolution = cells;
    row.value = entry.empirical_constant;
    row.conservative = entry.max_ratio.front();
    row.optimistic = entry.max_ratio.back();
    row.seed = man.seed;
    out.rows.push_back(row);
  }
  return out;
}

RunOutput run_pairing(const Manifest& man) {
  const int cells = param_int(man.params, "cells", 128);
  const GridGeom geom = grid_geom_2d(-0.2, 1.4, -0.4, 1.2, cells, cells);
  GridFunction f1 = sample_function(geom, [](std::span<const double> p) {
    return p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0 ? 1.0 : 0.0;
  });
  GridFunction f2 = sample_function(geom, [](std::span<const double> p) {
    return p[0] >= 0.3089 && p[0] <= 1.3089 && p[1] >= -0.2117 && p[1] <= 0.7883 ? 1.0 : 0.0;
  });
  PairingResult result = pairing_check(f1, f2, man.resolution);
  RunOutput out;
  CsvRow row;
  row.op = "pairing";
  row.n = 1;
  row.params = "inputs=offset_squares";
  row.resolution = man.resolution;
  row.value = result.relative_error;
  row.conservative = result.lhs;
  row.optimistic = result.rhs;
  row.seed = man.seed;
  out.rows.push_back(row);
  return out;
}

RunOutput run_sobolev(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  Box box;
  box.lo.assign(dim.ambient(), -1.2);
  box.hi.assign(dim.ambient(), 1.2);
  SampledFunction u = sample_compact_function(dim, box, man.resolution, 2,
                                              [](std::span<const double> p) {
                                                double r2 = 0.0;
                                                for (double v : p) r2 += v * v;
                                                return std::pow(std::max(0.0, 1.0 - r2 / 1.44), 3.0);
                                              });
  RatioReport report = sobolev_ratio(u, dim);
  RunOutput out;
  out.rows.push_back(row_from_report("sobolev", dim.n, "input=bump", report, man.seed));
  return out;
}

RunOutput run_isoperimetric(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  Region region = param_str(man.params, "region", "euclidean-ball") == "euclidean-ball"
                      ? euclidean_ball_region(std::vector<double>(dim.ambient(), 0.0),
                                              param_double(man.params, "radius", 1.0))
                      : region_from_params(man.params, dim);
  RatioReport report = isoperimetric_ratio(region, dim, man.resolution);
  RunOutput out;
  out.rows.push_back(
      row_from_report("isoperimetric", dim.n, "region=" + region.label, report, man.seed));
  return out;
}

RunOutput run_levelset_lemma(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  Box box;
  box.lo.assign(dim.ambient(), -1.2);
  box.hi.assign(dim.ambient(), 1.2);
  SampledFunction u = sample_compact_function(dim, box, man.resolution, 2,
                                              [](std::span<const double> p) {
                                                double r2 = 0.0;
                                                for (double v : p) r2 += v * v;
                                                return 1.5 * std::pow(std::max(0.0, 1.0 - r2 / 1.44),
                                                                      3.0);
                                              });
  std::vector<LemmaRow> rows = levelset_lemma_table(u, dim);
  RunOutput out;
  for (const auto& lemma_row : rows) {
    CsvRow row;
    row.op = "levelset-lemma";
    row.n = dim.n;
    row.params = "j=" + std::to_string(lemma_row.j) + ";k=" + std::to_string(lemma_row.k);
    row.resolution = man.resolution;
    row.value = lemma_row.check.slack;
    row.conservative = lemma_row.check.lhs;
    row.optimistic = lemma_row.check.rhs;
    row.seed = man.seed;
    out.rows.push_back(row);
  }
  return out;
}

RunOutput run_search(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  const std::string kind = param_str(man.params, "family", "box");
  RegionFamily family;
  if (kind == "box")
    family = box_family(dim);
  else if (kind == "ball")
    family = koranyi_ball_family(dim);
  else if (kind == "two-boxes")
    family = two_box_family(dim);
  else
    throw std::invalid_argument("unknown search family: " + kind);
  SearchConfig config;
  config.iterations = param_int(man.params, "iterations", 40);
  config.restarts = param_int(man.params, "restarts", 2);
  config.resolution = man.resolution;
  config.seed = man.seed;
  SearchResult result = extremizer_search(family, dim, config);
  RunOutput out;
  for (const auto& tp : result.trace) {
    CsvRow row;
    row.op = "search-trace";
    row.n = dim.n;
    row.params = "restart=" + std::to_string(tp.restart) + ";iter=" + std::to_string(tp.iteration);
    row.resolution = man.resolution;
    row.value = tp.value;
    row.seed = man.seed;
    out.rows.push_back(row);
  }
  CsvRow best;
  best.op = "search-best";
  best.n = dim.n;
  std::ostringstream ps;
  ps << "family=" << family.name << ";params=";
  for (size_t i = 0; i < result.best_params.size(); ++i)
    ps << (i ? "|" : "") << fmt_g(result.best_params[i]);
  best.params = ps.str();
  best.resolution = man.resolution;
  best.value = result.best_ratio;
  best.conservative = result.best_ratio;
  best.optimistic = result.best_ratio;
  best.seed = man.seed;
  out.rows.push_back(best);
  return out;
}

RunOutput run_invariance(const Manifest& man) {
  const HDim dim{param_int(man.params, "n", 1)};
  Region region = region_from_params(man.params, dim);
  std::vector<HPoint> translations = {HPoint{{0.31, -0.22}, 0.17}, HPoint{{-0.45, 0.11}, -0.09},
                                      HPoint{{0.12, 0.38}, 0.25}};
  if (dim.n != 1) {
    translations.clear();
    translations.push_back(HPoint{std::vector<double>(dim.horizontal(), 0.2), 0.1});
  }
  InvarianceReport report =
      invariance_suite(region, dim, translations, {0.5, 2.0}, man.resolution);
  RunOutput out;
  CsvRow base;
  base.op = "invariance:base";
  base.n = dim.n;
  base.params = "region=" + region.label;
  base.resolution = man.resolution;
  base.value = report.base_value;
  base.seed = man.seed;
  out.rows.push_back(base);
  for (const auto& row : report.rows) {
    CsvRow r;
    r.op = report.pass ? "invariance" : "invariance:FAIL";
    r.n = dim.n;
    r.params = row.transform;
    r.resolution = man.resolution;
    r.value = row.value;
    r.conservative = row.rel_change;
    r.optimistic = report.tolerance;
    r.seed = man.seed;
    out.rows.push_back(r);
  }
  out.inconclusive = !report.pass;
  return out;
}

RunOutput run_acceptance_experiment(const Manifest& man) {
  const bool quick = param_str(man.params, "level", "quick") != "full";
  AcceptanceReport report = run_acceptance(quick, &std::cout);
  RunOutput out;
  for (const auto& result : report.results) {
    CsvRow row;
    row.op = "acceptance:" + result.id + (result.pass ? ":PASS" : ":FAIL");
    row.n = 0;
    row.params = result.detail;
    // The detail string may contain commas; scrub for CSV cleanliness.
    for (char& ch : row.params)
      if (ch == ',') ch = ';';
    row.resolution = quick ? 0 : 1;
    row.value = result.pass ? 1.0 : 0.0;
    row.conservative = result.seconds;
    row.seed = man.seed;
    out.rows.push_back(row);
  }
  return out;
}

const std::set<std::string>& experiment_names() {
  static const std::set<std::string> names = {
      "lw-ratio",   "strong",         "vertex",        "sharpness", "euclid-counterexample",
      "radon-norm", "s-scaling",      "l32l3",         "pairing",   "sobolev",
      "isoperimetric", "levelset-lemma", "search",     "invariance", "acceptance"};
  return names;
}

}  // namespace

bool is_known_experiment(const std::string& name) { return experiment_names().count(name) > 0; }

Manifest manifest_from_json(const json& doc) {
  Manifest man;
  man.experiment = doc.value("experiment", "");
  if (doc.contains("params")) man.params = doc.at("params");
  man.seed = doc.value("seed", 1ull);
  man.resolution = doc.value("resolution", 128);
  man.output = doc.value("output", "hlw-out");
  man.deterministic = doc.value("deterministic", false);
  man.jobs = doc.value("jobs", 0);
  return man;
}

int run_manifest(const Manifest& man) {
  if (!is_known_experiment(man.experiment)) {
    std::cerr << "unknown experiment: " << man.experiment << "\n";
    return kExitUnknownExperiment;
  }
  if (man.jobs > 0) set_worker_count(man.jobs);

  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  try {
    if (man.experiment == "lw-ratio") out = run_lw_ratio(man);
    else if (man.experiment == "strong") out = run_strong(man);
    else if (man.experiment == "vertex") out = run_vertex(man);
    else if (man.experiment == "sharpness") out = run_sharpness(man);
    else if (man.experiment == "euclid-counterexample") out = run_euclid(man);
    else if (man.experiment == "radon-norm") out = run_radon_norm(man);
    else if (man.experiment == "s-scaling") out = run_s_scaling(man);
    else if (man.experiment == "l32l3") out = run_l32l3(man);
    else if (man.experiment == "pairing") out = run_pairing(man);
    else if (man.experiment == "sobolev") out = run_sobolev(man);
    else if (man.experiment == "isoperimetric") out = run_isoperimetric(man);
    else if (man.experiment == "levelset-lemma") out = run_levelset_lemma(man);
    else if (man.experiment == "search") out = run_search(man);
    else if (man.experiment == "invariance") out = run_invariance(man);
    else if (man.experiment == "acceptance") out = run_acceptance_experiment(man);
  } catch (const std::invalid_argument& ex) {
    std::cerr << "invalid params: " << ex.what() << "\n";
    return kExitInvalidParams;
  } catch (const DiscretizationError& ex) {
    std::cerr << "inconclusive: " << ex.what() << "\n";
    return kExitInconclusive;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  namespace fs = std::filesystem;
  fs::create_directories(man.output);
  {
    std::ofstream csv(fs::path(man.output) / "results.csv", std::ios::binary);
    csv << csv_text(out.rows);
  }
  {
    json meta;
    meta["tool"] = "hlw";
    meta["version"] = kToolVersion;
    meta["experiment"] = man.experiment;
    meta["wall_seconds"] = wall;
    json echo;
    echo["experiment"] = man.experiment;
    echo["params"] = man.params;
    echo["seed"] = man.seed;
    echo["resolution"] = man.resolution;
    echo["output"] = man.output;
    echo["deterministic"] = man.deterministic;
    meta["manifest"] = echo;
    std::ofstream metaf(fs::path(man.output) / "meta.json", std::ios::binary);
    metaf << meta.dump(2) << "\n";
  }
  return out.inconclusive ? kExitInconclusive : kExitOk;
}

}  // namespace hlw

// nhee: biorthogonal entanglement entropies of non-Hermitian lattice models.
// Configuration comes from flags and/or an INI config file (flags win); every
// run emits a machine-readable envelope (CSV or JSON) whose rows carry the
// full configuration for provenance.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhee/entropy.hpp"
#include "nhee/fock.hpp"
#include "nhee/scaling.hpp"
#include "nhee/task_pool.hpp"
#include "nhee/version.hpp"

namespace {

using json = nlohmann::json;
using nhee::cdouble;

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string model = "two-band";
  // two-band
  double t = 0.8, a0 = 1.0, b0 = 1.2;
  int B = 1;
  // four-band
  double M = 3.0, delta = 2.0, alpha = 0.0, lambda = 1.0, Z = 1.0;
  double k0 = 1.5707963267948966;
  bool k0_from_zeeman = false;

  int L = 100, Ly = 3;
  std::string bc = "open";
  double ef = 0.0;
  std::vector<int> renyi{2, 3};
  std::string task;
  std::vector<int> L_list;
  std::vector<int> Ly_list;
  int smin_L = 60;
  std::vector<int> smin_Ly_list;
  int instances = 24;
  std::string out;
  std::string format = "csv";
  int threads = 0;
  double tie_tol = 1e-12;
  bool dump_p = false;
  std::string dump_pbar;

  nhee::ModelSpec spec() const {
    if (model == "two-band") return nhee::ModelSpec{nhee::TwoBandParams{t, a0, b0, B}};
    if (model != "four-band") throw nhee::config_error("unknown model '" + model + "'");
    if (k0_from_zeeman)
      return nhee::ModelSpec{
          nhee::FourBandParams::with_k0_from_zeeman(M, delta, alpha, lambda, Z)};
    nhee::FourBandParams p;
    p.M = M;
    p.delta = delta;
    p.alpha = alpha;
    p.lambda = lambda;
    p.Z = Z;
    p.k0 = k0;
    return nhee::ModelSpec{p};
  }

  nhee::Geometry geometry() const {
    if (bc != "open" && bc != "periodic")
      throw nhee::config_error("--bc must be open or periodic");
    nhee::Geometry g{L, Ly, bc == "open" ? nhee::YBoundary::open : nhee::YBoundary::periodic};
    g.validate();
    return g;
  }
};

// ---------------------------------------------------------------------------
// Result envelope
// ---------------------------------------------------------------------------

using Cell = std::variant<std::monostate, long long, double, std::string, bool>;

struct Envelope {
  std::vector<std::string> columns;
  std::vector<std::map<std::string, Cell>> rows;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string cell_to_csv(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "";
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return fmt_double(*d);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

json cell_to_json(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

// Config columns prefixed to every row so each number is traceable.
void add_config_cells(const RunConfig& cfg, std::map<std::string, Cell>& row) {
  row["model"] = cfg.model;
  if (cfg.model == "two-band") {
    row["t"] = cfg.t;
    row["a0"] = cfg.a0;
    row["b0"] = cfg.b0;
    row["B"] = (long long)cfg.B;
  } else {
    row["M"] = cfg.M;
    row["delta"] = cfg.delta;
    row["alpha"] = cfg.alpha;
    row["lambda"] = cfg.lambda;
    row["Z"] = cfg.Z;
    row["k0"] = cfg.k0_from_zeeman ? std::asin(cfg.Z) : cfg.k0;
  }
  row["Ly"] = (long long)cfg.Ly;
  row["bc"] = cfg.bc;
  row["ef"] = cfg.ef;
}

std::vector<std::string> config_columns(const RunConfig& cfg) {
  if (cfg.model == "two-band") return {"model", "t", "a0", "b0", "B", "Ly", "bc", "ef"};
  return {"model", "M", "delta", "alpha", "lambda", "Z", "k0", "Ly", "bc", "ef"};
}

void append_columns(std::vector<std::string>& cols, const std::vector<std::string>& extra) {
  cols.insert(cols.end(), extra.begin(), extra.end());
}

// ---------------------------------------------------------------------------
// Task runners
// ---------------------------------------------------------------------------

Envelope run_spectrum(const RunConfig& cfg) {
  const auto spec = cfg.spec();
  const auto g = cfg.geometry();
  const auto ks = nhee::twisted_k_grid(g.L);

  struct KResult {
    Eigen::VectorXcd energies;
    double eta = -1.0;
    bool edge_pair = false;
  };
  std::vector<KResult> per_k(ks.size());
  nhee::parallel_for(ks.size(), cfg.threads, [&](std::size_t i) {
    const auto es = nhee::biorth_eig(nhee::ribbon_hamiltonian(spec, g, ks[i]).entries);
    KResult r;
    r.energies = es.energies;
    try {
      const auto [lo, hi] = nhee::fermi_straddling_pair(es, cfg.ef);
      bool edge = spec.is_two_band() && nhee::topo_region_indicator(spec.two_band(), ks[i]);
      r.eta = nhee::eta_overlap(es, lo, hi, edge).eta;
      r.edge_pair = edge;
    } catch (const nhee::error&) {
      // E_F outside the spectrum at this k; eta column stays empty
    }
    per_k[i] = std::move(r);
  });

  Envelope env;
  env.columns = config_columns(cfg);
  append_columns(env.columns, {"record", "L", "k", "band", "re_E", "im_E", "eta_mid", "edge_pair"});
  for (std::size_t i = 0; i < ks.size(); ++i) {
    for (int b = 0; b < per_k[i].energies.size(); ++b) {
      std::map<std::string, Cell> row;
      add_config_cells(cfg, row);
      row["record"] = std::string("spectrum");
      row["L"] = (long long)g.L;
      row["k"] = ks[i];
      row["band"] = (long long)b;
      row["re_E"] = per_k[i].energies[b].real();
      row["im_E"] = per_k[i].energies[b].imag();
      if (per_k[i].eta >= 0.0) {
        row["eta_mid"] = per_k[i].eta;
        row["edge_pair"] = per_k[i].edge_pair;
      }
      env.rows.push_back(std::move(row));
    }
  }
  return env;
}

void add_renyi_cells(const std::map<int, cdouble>& renyi, std::map<std::string, Cell>& row) {
  for (const auto& [n, s] : renyi) {
    row["renyi_" + std::to_string(n) + "_re"] = s.real();
    row["renyi_" + std::to_string(n) + "_im"] = s.imag();
  }
}

std::vector<std::string> renyi_columns(const std::vector<int>& orders) {
  std::vector<std::string> cols;
  for (int n : orders) {
    cols.push_back("renyi_" + std::to_string(n) + "_re");
    cols.push_back("renyi_" + std::to_string(n) + "_im");
  }
  return cols;
}

Envelope run_entropy(const RunConfig& cfg, json* p_dump) {
  const auto spec = cfg.spec();
  const auto g = cfg.geometry();
  nhee::CorrelationOptions copts;
  copts.tie_tol = cfg.tie_tol;
  copts.threads = cfg.threads;
  const auto tp = nhee::truncated_projector(spec, g, cfg.ef, copts);
  const auto ps = nhee::occupation_spectrum(tp);
  const auto rep = nhee::entropy_report(ps, cfg.renyi);

  if (!cfg.dump_pbar.empty()) {
    std::ofstream f(cfg.dump_pbar);
    if (!f) throw nhee::config_error("cannot open --dump-pbar path " + cfg.dump_pbar);
    f << "x1,y1,s1,x2,y2,s2,re,im\n";
    for (int y1 = 0; y1 < tp.Ly; ++y1)
      for (int s1 = 0; s1 < tp.n_orb; ++s1)
        for (int y2 = 0; y2 < tp.Ly; ++y2)
          for (int s2 = 0; s2 < tp.n_orb; ++s2) {
            const auto blk = tp.block(y1, s1, y2, s2);
            for (int x1 = 0; x1 < tp.cells; ++x1)
              for (int x2 = 0; x2 < tp.cells; ++x2)
                f << x1 + 1 << ',' << y1 + 1 << ',' << s1 << ',' << x2 + 1 << ',' << y2 + 1
                  << ',' << s2 << ',' << fmt_double(blk(x1, x2).real()) << ','
                  << fmt_double(blk(x1, x2).imag()) << '\n';
          }
  }
  if (cfg.dump_p && p_dump) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < ps.values.size(); ++i)
      arr.push_back({ps.values[i].real(), ps.values[i].imag()});
    *p_dump = std::move(arr);
  }

  Envelope env;
  env.columns = config_columns(cfg);
  append_columns(env.columns, {"record", "L", "re_SA", "im_SA"});
  append_columns(env.columns, renyi_columns(cfg.renyi));
  append_columns(env.columns, {"max_abs_p", "pt_residual"});
  std::map<std::string, Cell> row;
  add_config_cells(cfg, row);
  row["record"] = std::string("entropy");
  row["L"] = (long long)g.L;
  row["re_SA"] = rep.s_von_neumann.real();
  row["im_SA"] = rep.s_von_neumann.imag();
  add_renyi_cells(rep.renyi, row);
  row["max_abs_p"] = ps.max_abs;
  row["pt_residual"] = rep.pt_imag_residual;
  env.rows.push_back(std::move(row));
  return env;
}

Envelope run_sweep(const RunConfig& cfg) {
  if (cfg.L_list.empty()) throw nhee::config_error("task sweep requires --L-list");
  const auto spec = cfg.spec();
  const auto g = cfg.geometry();
  nhee::SweepOptions sopts;
  sopts.tie_tol = cfg.tie_tol;
  sopts.threads = cfg.threads;
  const auto rows = nhee::sweep_entropy_vs_L(spec, g, cfg.L_list, cfg.ef, cfg.renyi, sopts);

  Envelope env;
  env.columns = config_columns(cfg);
  append_columns(env.columns, {"record", "L", "re_SA", "im_SA"});
  append_columns(env.columns, renyi_columns(cfg.renyi));
  append_columns(env.columns, {"max_abs_p", "pt_residual", "error"});
  for (const auto& r : rows) {
    std::map<std::string, Cell> row;
    add_config_cells(cfg, row);
    row["record"] = std::string("sweep");
    row["L"] = (long long)r.L;
    if (r.ok) {
      row["re_SA"] = r.s.real();
      row["im_SA"] = r.s.imag();
      add_renyi_cells(r.renyi, row);
      row["max_abs_p"] = r.max_abs_p;
      row["pt_residual"] = r.pt_imag_residual;
    } else {
      row["error"] = r.error;
      env.warnings.push_back("L=" + std::to_string(r.L) + ": " + r.error);
    }
    env.rows.push_back(std::move(row));
  }
  return env;
}

Envelope run_hierarchy(const RunConfig& cfg) {
  if (cfg.L_list.empty()) throw nhee::config_error("task hierarchy requires --L-list");
  const auto spec = cfg.spec();
  const auto g = cfg.geometry();
  nhee::SweepOptions sopts;
  sopts.tie_tol = cfg.tie_tol;
  sopts.threads = cfg.threads;
  const auto rep = nhee::hierarchy_exponents(spec, g, cfg.L_list, cfg.ef, sopts);

  Envelope env;
  env.columns = config_columns(cfg);
  append_columns(env.columns, {"record", "L", "branch_rank", "abs_p", "exponent", "predicted"});
  for (const auto& lr : rep.long_rows) {
    std::map<std::string, Cell> row;
    add_config_cells(cfg, row);
    row["record"] = std::string("branch");
    row["L"] = (long long)lr.L;
    row["branch_rank"] = (long long)lr.branch_rank;
    row["abs_p"] = lr.abs_p;
    env.rows.push_back(std::move(row));
  }
  for (std::size_t b = 0; b < rep.exponents.size(); ++b) {
    std::map<std::string, Cell> row;
    add_config_cells(cfg, row);
    row["record"] = std::string("exponent");
    row["branch_rank"] = (long long)(b + 1);
    row["exponent"] = rep.exponents[b];
    if (b < rep.predicted.size()) row["predicted"] = rep.predicted[b];
    env.rows.push_back(std::move(row));
  }
  if (rep.rank_swap_warning)
    env.warnings.push_back("branch count varied across L (rank swaps); fits use the common prefix");
  return env;
}

Envelope run_classify(const RunConfig& cfg) {
  if (cfg.model != "four-band")
    throw nhee::config_error("task classify-ep applies to the four-band model");
  const auto spec = cfg.spec();
  const auto g = cfg.geometry();
  const auto cls = nhee::ep_dispersion_classify(spec.four_band(), g);

  Envelope env;
  env.columns = config_columns(cfg);
  append_columns(env.columns,
                 {"record", "class", "exponent", "r2", "slope_stderr", "schur_checked",
                  "det_R_vanishes"});
  std::map<std::string, Cell> row;
  add_config_cells(cfg, row);
  row["record"] = std::string("classify");
  row["class"] = std::string(cls.kind == nhee::EpDispersionKind::quadratic_det
                                 ? "quadratic_det"
                                 : "linear_det");
  row["exponent"] = cls.exponent;
  row["r2"] = cls.fit.r_squared;
  row["slope_stderr"] = cls.fit.slope_stderr;
  row["schur_checked"] = cls.schur_checked;
  if (cls.schur_checked) row["det_R_vanishes"] = cls.det_R_vanishes;
  env.rows.push_back(std::move(row));
  return env;
}

Envelope run_gapped(const RunConfig& cfg) {
  if (cfg.model != "two-band")
    throw nhee::config_error("task gapped-scaling applies to the two-band model");
  if (cfg.L_list.empty() || cfg.Ly_list.empty() || cfg.smin_Ly_list.empty())
    throw nhee::config_error(
        "task gapped-scaling requires --L-list (kappa window), --Ly-list and --smin-Ly-list");
  nhee::GappedWindows w;
  w.kappa_L = cfg.L_list;
  w.kappa_Ly = cfg.Ly_list;
  w.smin_Ly = cfg.smin_Ly_list;
  w.smin_L = cfg.smin_L;
  nhee::SweepOptions sopts;
  sopts.tie_tol = cfg.tie_tol;
  sopts.threads = cfg.threads;
  const auto res = nhee::gapped_scaling(cfg.spec().two_band(), w, cfg.ef, sopts);

  Envelope env;
  env.columns = config_columns(cfg);
  append_columns(env.columns, {"record", "L", "fit_Ly", "slope", "slope_stderr", "r2", "re_SA",
                               "kappa", "xi", "monotonic", "predicted_slope"});
  for (std::size_t i = 0; i < res.ly_values.size(); ++i) {
    std::map<std::string, Cell> row;
    add_config_cells(cfg, row);
    row["record"] = std::string("ly_fit");
    row["fit_Ly"] = (long long)res.ly_values[i];
    row["slope"] = res.per_ly_fits[i].slope;
    row["slope_stderr"] = res.per_ly_fits[i].slope_stderr;
    row["r2"] = res.per_ly_fits[i].r_squared;
    env.rows.push_back(std::move(row));
  }
  {
    std::map<std::string, Cell> row;
    add_config_cells(cfg, row);
    row["record"] = std::string("kappa");
    row["kappa"] = res.kappa;
    row["xi"] = res.xi;
    row["monotonic"] = res.slope_magnitude_monotonic;
    row["r2"] = res.slope_vs_ly.r_squared;
    env.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < res.smin_ly.size(); ++i) {
    std::map<std::string, Cell> row;
    add_config_cells(cfg, row);
    row["record"] = std::string("smin");
    row["fit_Ly"] = (long long)res.smin_ly[i];
    row["L"] = (long long)w.smin_L;
    row["re_SA"] = res.smin_values[i];
    env.rows.push_back(std::move(row));
  }
  {
    std::map<std::string, Cell> row;
    add_config_cells(cfg, row);
    row["record"] = std::string("smin_fit");
    row["slope"] = res.smin_fit.slope;
    row["r2"] = res.smin_fit.r_squared;
    row["predicted_slope"] = res.smin_predicted_slope;
    env.rows.push_back(std::move(row));
  }
  return env;
}

Envelope run_bulk_ep(const RunConfig& cfg) {
  if (cfg.model != "four-band")
    throw nhee::config_error("task bulk-ep-scan applies to the four-band model");
  if (cfg.L_list.empty()) throw nhee::config_error("task bulk-ep-scan requires --L-list");
  nhee::SweepOptions sopts;
  sopts.tie_tol = cfg.tie_tol;
  sopts.threads = cfg.threads;
  const auto rep =
      nhee::bulk_ep_scan(cfg.spec().four_band(), cfg.geometry(), cfg.ef, cfg.L_list, sopts);

  Envelope env;
  env.columns = config_columns(cfg);
  append_columns(env.columns, {"record", "L", "re_SA", "im_SA", "max_re_p", "min_re_p",
                               "outside_interval", "exit_L", "dip_L", "trend_increasing",
                               "error"});
  for (const auto& r : rep.rows) {
    std::map<std::string, Cell> row;
    add_config_cells(cfg, row);
    row["record"] = std::string("scan");
    row["L"] = (long long)r.L;
    if (r.ok) {
      row["re_SA"] = r.s.real();
      row["im_SA"] = r.s.imag();
      row["max_re_p"] = r.max_re_p;
      row["min_re_p"] = r.min_re_p;
      row["outside_interval"] = r.outside_interval;
    } else {
      row["error"] = r.error;
      env.warnings.push_back("L=" + std::to_string(r.L) + ": " + r.error);
    }
    env.rows.push_back(std::move(row));
  }
  std::map<std::string, Cell> row;
  add_config_cells(cfg, row);
  row["record"] = std::string("summary");
  if (rep.exit_L) row["exit_L"] = (long long)*rep.exit_L;
  if (rep.dip_L) row["dip_L"] = (long long)*rep.dip_L;
  row["trend_increasing"] = rep.trend_increasing;
  env.rows.push_back(std::move(row));
  return env;
}

Envelope run_oracle(const RunConfig& cfg, int* failures) {
  const auto rows = nhee::run_oracle_suite(cfg.instances);
  Envelope env;
  env.columns = {"record", "instance", "label", "modes", "s_diff", "s2_diff", "s3_diff",
                 "swap_checked", "swap_diff", "overlap_residual", "pass"};
  int fail = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::map<std::string, Cell> row;
    row["record"] = std::string("oracle");
    row["instance"] = (long long)i;
    row["label"] = r.label;
    row["modes"] = (long long)r.modes;
    row["s_diff"] = r.s_diff;
    row["s2_diff"] = r.s2_diff;
    row["s3_diff"] = r.s3_diff;
    row["swap_checked"] = r.swap_checked;
    if (r.swap_checked) row["swap_diff"] = r.swap_diff;
    row["overlap_residual"] = r.overlap_residual;
    row["pass"] = r.pass;
    if (!r.pass) ++fail;
    env.rows.push_back(std::move(row));
  }
  if (failures) *failures = fail;
  return env;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

std::string default_out_path(const RunConfig& cfg) {
  const char* dir = std::getenv("NHEE_OUT_DIR");
  const std::filesystem::path base = dir && *dir ? dir : ".";
  return (base / (cfg.task + "." + cfg.format)).string();
}

void emit(const Envelope& env, const RunConfig& cfg, const std::string& config_echo,
          const json& p_dump, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw nhee::config_error("cannot open output path " + path);
  if (cfg.format == "csv") {
    f << "# nhee " << nhee::kVersion << " schema " << nhee::kSchemaVersion << "\n";
    std::istringstream echo(config_echo);
    for (std::string line; std::getline(echo, line);)
      if (!line.empty()) f << "# config: " << line << "\n";
    for (const auto& w : env.warnings) f << "# warning: " << w << "\n";
    for (std::size_t i = 0; i < env.columns.size(); ++i)
      f << (i ? "," : "") << env.columns[i];
    f << "\n";
    for (const auto& row : env.rows) {
      for (std::size_t i = 0; i < env.columns.size(); ++i) {
        const auto it = row.find(env.columns[i]);
        f << (i ? "," : "") << (it == row.end() ? "" : cell_to_csv(it->second));
      }
      f << "\n";
    }
  } else {
    json j;
    j["schema_version"] = nhee::kSchemaVersion;
    j["tool"] = "nhee";
    j["version"] = nhee::kVersion;
    j["task"] = cfg.task;
    j["config_ini"] = config_echo;
    j["columns"] = env.columns;
    json rows = json::array();
    for (const auto& row : env.rows) {
      json jr;
      for (const auto& [key, cell] : row) {
        if (std::holds_alternative<std::monostate>(cell)) continue;
        jr[key] = cell_to_json(cell);
      }
      rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    j["warnings"] = env.warnings;
    if (!p_dump.is_null()) j["occupation_spectrum"] = p_dump;
    j["wall_time_s"] = env.wall_time_s;
    f << j.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  // our task pool owns the parallelism; one deterministic BLAS thread
  setenv("OPENBLAS_NUM_THREADS", "1", 1);

  CLI::App app{"nhee: biorthogonal entanglement of non-Hermitian lattice models"};
  app.set_version_flag("--version", std::string("nhee ") + nhee::kVersion);
  app.set_config("--config", "", "INI config file (flags override it)");

  RunConfig cfg;
  app.add_option("--model", cfg.model, "two-band | four-band")->capture_default_str();
  app.add_option("--t", cfg.t, "two-band inter-cell hopping")->capture_default_str();
  app.add_option("--a0", cfg.a0, "two-band intra-cell hopping (one direction)")
      ->capture_default_str();
  app.add_option("--b0", cfg.b0, "two-band dispersion offset")->capture_default_str();
  app.add_option("--B", cfg.B, "two-band hopping-distance exponent")->capture_default_str();
  app.add_option("--M", cfg.M, "four-band mass")->capture_default_str();
  app.add_option("--delta", cfg.delta, "four-band non-Hermiticity")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "four-band Zeeman mixing angle")->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "four-band spin-orbit strength")->capture_default_str();
  app.add_option("--Z", cfg.Z, "four-band Zeeman magnitude")->capture_default_str();
  app.add_option("--k0", cfg.k0, "four-band momentum offset")->capture_default_str();
  app.add_flag("--k0-from-zeeman", cfg.k0_from_zeeman, "set k0 = arcsin(Z); requires |Z| <= 1");
  app.add_option("--L", cfg.L, "circumference (unit cells, even)")->capture_default_str();
  app.add_option("--Ly", cfg.Ly, "cylinder length (unit cells)")->capture_default_str();
  app.add_option("--bc", cfg.bc, "y boundary: open | periodic")->capture_default_str();
  app.add_option("--ef", cfg.ef, "Fermi energy")->capture_default_str();
  app.add_option("--renyi", cfg.renyi, "Renyi orders (n >= 2)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--task", cfg.task,
                 "spectrum | entropy | sweep | hierarchy | classify-ep | gapped-scaling | "
                 "bulk-ep-scan | oracle-check")
      ->required();
  app.add_option("--L-list", cfg.L_list, "L values for sweep-style tasks")->delimiter(',');
  app.add_option("--Ly-list", cfg.Ly_list, "Ly values (gapped-scaling kappa fits)")
      ->delimiter(',');
  app.add_option("--smin-L", cfg.smin_L, "L >> Ly sampling point for S_min")
      ->capture_default_str();
  app.add_option("--smin-Ly-list", cfg.smin_Ly_list, "Ly values for the S_min fit")
      ->delimiter(',');
  app.add_option("--instances", cfg.instances, "oracle-check instance count")
      ->capture_default_str();
  app.add_option("--out", cfg.out, "output path (default: $NHEE_OUT_DIR/<task>.<format>)");
  app.add_option("--format", cfg.format, "csv | json")->capture_default_str();
  app.add_option("--threads", cfg.threads, "task-pool size (0 = auto)")->capture_default_str();
  app.add_option("--tie-tol", cfg.tie_tol, "occupation tie tolerance at E_F")
      ->capture_default_str();
  app.add_flag("--dump-p", cfg.dump_p, "include the occupation spectrum (json format)");
  app.add_option("--dump-pbar", cfg.dump_pbar, "write P-bar entries to this CSV (task entropy)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cfg.format != "csv" && cfg.format != "json")
      throw nhee::config_error("--format must be csv or json");

    // config echo: everything needed to reproduce the rows; thread count is
    // an execution detail and deliberately omitted
    std::string config_echo;
    {
      std::istringstream full(app.config_to_str(true, false));
      for (std::string line; std::getline(full, line);) {
        if (line.rfind("threads=", 0) == 0 || line.rfind("out=", 0) == 0 || line.empty())
          continue;
        config_echo += line + "\n";
      }
    }

    const auto t0 = std::chrono::steady_clock::now();
    Envelope env;
    json p_dump;
    int oracle_failures = 0;
    if (cfg.task == "spectrum") env = run_spectrum(cfg);
    else if (cfg.task == "entropy") env = run_entropy(cfg, &p_dump);
    else if (cfg.task == "sweep") env = run_sweep(cfg);
    else if (cfg.task == "hierarchy") env = run_hierarchy(cfg);
    else if (cfg.task == "classify-ep") env = run_classify(cfg);
    else if (cfg.task == "gapped-scaling") env = run_gapped(cfg);
    else if (cfg.task == "bulk-ep-scan") env = run_bulk_ep(cfg);
    else if (cfg.task == "oracle-check") env = run_oracle(cfg, &oracle_failures);
    else throw nhee::config_error("unknown task '" + cfg.task + "'");
    env.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string path = cfg.out.empty() ? default_out_path(cfg) : cfg.out;
    emit(env, cfg, config_echo, p_dump, path);
    std::fprintf(stdout, "%s: %zu row(s) -> %s\n", cfg.task.c_str(), env.rows.size(),
                 path.c_str());
    for (const auto& w : env.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (cfg.task == "oracle-check" && oracle_failures > 0) {
      std::fprintf(stderr, "{\"error\":{\"code\":4,\"message\":\"oracle-check: %d instance(s) above tolerance\"}}\n",
                   oracle_failures);
      return 4;
    }
    return 0;
  } catch (const nhee::error& e) {
    const int code = nhee::exit_code_for(e);
    json err{{"error", {{"code", code}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return code;
  } catch (const std::exception& e) {
    json err{{"error", {{"code", 4}, {"message", e.what()}}}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 4;
  }
}

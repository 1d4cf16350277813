#include "config.hpp"

#include <cmath>
#include <sstream>

#include "io_util.hpp"

namespace dsm {

namespace {

[[noreturn]] void field_error(const KvEntry& e, const std::string& msg) {
  fail(ErrorCode::parse,
       "line " + std::to_string(e.line) + ": " + e.key + " " + msg);
}

bool parse_bool(const KvEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "off") return false;
  field_error(e, "must be true or false (got '" + e.value + "')");
}

double field_double(const KvEntry& e) {
  try {
    return parse_double(e.value, e.key);
  } catch (const Error&) {
    field_error(e, "must be a number (got '" + e.value + "')");
  }
}

long long field_int(const KvEntry& e) {
  try {
    return parse_int(e.value, e.key);
  } catch (const Error&) {
    field_error(e, "must be an integer (got '" + e.value + "')");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool have_delta = false;
  for (const auto& e : parse_kv_text(text)) {
    const std::string& k = e.key;
    if (k == "problem.catalog") {
      cfg.catalog = e.value;
    } else if (k == "problem.dim") {
      cfg.dim = static_cast<int>(field_int(e));
    } else if (k == "problem.c") {
      cfg.c = field_double(e);
    } else if (k == "problem.y") {
      cfg.y_profile = e.value;
    } else if (k == "problem.y_scale") {
      cfg.y_scale = field_double(e);
    } else if (k == "problem.delta") {
      cfg.delta = field_double(e);
      have_delta = true;
    } else if (k == "problem.seed") {
      cfg.seed = static_cast<std::uint64_t>(field_int(e));
    } else if (k == "schedule.d0") {
      if (e.value == "auto") {
        cfg.d0_auto = true;
      } else {
        cfg.d0_auto = false;
        cfg.d0 = field_double(e);
        if (!(cfg.d0 > 0)) field_error(e, "must be positive or 'auto'");
      }
    } else if (k == "schedule.d") {
      cfg.d = field_double(e);
      if (!(cfg.d >= 1)) field_error(e, "must be >= 1");
    } else if (k == "schedule.b") {
      cfg.b = field_double(e);
      if (!(cfg.b > 0 && cfg.b <= 1)) field_error(e, "must be in (0,1]");
    } else if (k == "schedule.C1") {
      cfg.C1 = field_double(e);
      if (!(cfg.C1 > 1)) field_error(e, "must be > 1");
    } else if (k == "schedule.gamma") {
      cfg.gamma = field_double(e);
      if (!(cfg.gamma > 0 && cfg.gamma <= 1))
        field_error(e, "must be in (0,1]");
    } else if (k == "schedule.y_norm_est") {
      if (e.value == "auto") {
        cfg.y_norm_est_auto = true;
      } else {
        cfg.y_norm_est_auto = false;
        cfg.y_norm_est = field_double(e);
        if (!(cfg.y_norm_est > 0)) field_error(e, "must be positive or 'auto'");
      }
    } else if (k == "schedule.bounds_R") {
      if (e.value == "auto") {
        cfg.bounds_R_auto = true;
      } else {
        cfg.bounds_R_auto = false;
        cfg.bounds_R = field_double(e);
        if (!(cfg.bounds_R > 0)) field_error(e, "must be positive or 'auto'");
      }
    } else if (k == "schedule.bounds_samples") {
      cfg.bounds_samples = static_cast<int>(field_int(e));
      if (cfg.bounds_samples < 1) field_error(e, "must be >= 1");
    } else if (k == "run.rule") {
      if (e.value == "discrepancy") {
        cfg.rule = StopKind::discrepancy;
      } else if (e.value == "a_priori") {
        cfg.rule = StopKind::a_priori;
      } else if (e.value == "max_iter") {
        cfg.rule = StopKind::max_iter;
      } else {
        field_error(e, "must be discrepancy, a_priori or max_iter");
      }
    } else if (k == "run.n_cap") {
      cfg.n_cap = field_int(e);
      if (cfg.n_cap < 0) field_error(e, "must be >= 0");
    } else if (k == "run.diagnostics") {
      cfg.diagnostics = parse_bool(e);
    } else if (k == "output.dir") {
      cfg.out_dir = e.value;
    } else if (k == "output.formats") {
      cfg.write_csv = cfg.write_json = false;
      for (const auto& f : split(e.value, ',')) {
        if (f == "csv") {
          cfg.write_csv = true;
        } else if (f == "json") {
          cfg.write_json = true;
        } else {
          field_error(e, "unknown format '" + f + "' (use csv, json)");
        }
      }
    } else if (k == "study.deltas") {
      cfg.study_deltas.clear();
      for (const auto& part : split(e.value, ','))
        cfg.study_deltas.push_back(parse_double(part, "study.deltas"));
    } else if (k == "verify.conditions_n") {
      cfg.conditions_n = field_int(e);
      if (cfg.conditions_n < 1) field_error(e, "must be >= 1");
    } else {
      field_error(e, "is not a recognized configuration key");
    }
  }

  // Cross-field validation; these fail with the field name even when the
  // key never appeared in the file.
  require(cfg.dim >= 1, ErrorCode::parse, "problem.dim must be >= 1");
  require(have_delta, ErrorCode::parse,
          cfg.rule == StopKind::discrepancy
              ? "problem.delta is required: the discrepancy rule needs the "
                "noise level"
              : "problem.delta is required");
  require(std::isfinite(cfg.delta) && cfg.delta > 0, ErrorCode::parse,
          "problem.delta must be positive");
  // Catalog and profile existence are checked here so a bad id fails at
  // parse time with the field named.
  try {
    make_catalog_operator(cfg.catalog, cfg.dim, cfg.c);
  } catch (const Error& e) {
    fail(ErrorCode::parse, std::string("problem.catalog: ") + e.what());
  }
  make_y_profile(cfg.y_profile, cfg.dim, cfg.y_scale);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "problem.catalog = " << cfg.catalog << "\n";
  out << "problem.dim = " << cfg.dim << "\n";
  out << "problem.c = " << fmt17(cfg.c) << "\n";
  out << "problem.y = " << cfg.y_profile << "\n";
  out << "problem.y_scale = " << fmt17(cfg.y_scale) << "\n";
  out << "problem.delta = " << fmt17(cfg.delta) << "\n";
  out << "problem.seed = " << cfg.seed << "\n";
  out << "schedule.d0 = " << (cfg.d0_auto ? "auto" : fmt17(cfg.d0)) << "\n";
  out << "schedule.d = " << fmt17(cfg.d) << "\n";
  out << "schedule.b = " << fmt17(cfg.b) << "\n";
  out << "schedule.C1 = " << fmt17(cfg.C1) << "\n";
  out << "schedule.gamma = " << fmt17(cfg.gamma) << "\n";
  out << "schedule.y_norm_est = "
      << (cfg.y_norm_est_auto ? "auto" : fmt17(cfg.y_norm_est)) << "\n";
  out << "schedule.bounds_R = "
      << (cfg.bounds_R_auto ? "auto" : fmt17(cfg.bounds_R)) << "\n";
  out << "schedule.bounds_samples = " << cfg.bounds_samples << "\n";
  out << "run.rule = " << to_string(cfg.rule) << "\n";
  out << "run.n_cap = " << cfg.n_cap << "\n";
  out << "run.diagnostics = " << (cfg.diagnostics ? "true" : "false") << "\n";
  out << "output.dir = " << cfg.out_dir << "\n";
  out << "output.formats = ";
  if (cfg.write_csv && cfg.write_json) {
    out << "csv,json";
  } else if (cfg.write_csv) {
    out << "csv";
  } else if (cfg.write_json) {
    out << "json";
  }
  out << "\n";
  if (!cfg.study_deltas.empty()) {
    out << "study.deltas = ";
    for (size_t i = 0; i < cfg.study_deltas.size(); ++i)
      out << (i ? "," : "") << fmt17(cfg.study_deltas[i]);
    out << "\n";
  }
  out << "verify.conditions_n = " << cfg.conditions_n << "\n";
  return out.str();
}

Vector make_y_profile(const std::string& profile, int dim, double scale) {
  require(dim >= 1, ErrorCode::invalid_argument,
          "make_y_profile: dim must be >= 1");
  auto grid = [dim](int i) { return (i + 0.5) / dim; };
  Vector y(dim);
  if (profile == "ones") {
    y.setConstant(scale);
  } else if (profile == "sin") {
    for (int i = 0; i < dim; ++i)
      y[i] = scale * std::sin(M_PI * grid(i));
  } else if (profile == "mixed") {
    Vector s1(dim), s2(dim);
    for (int i = 0; i < dim; ++i) {
      s1[i] = std::sin(M_PI * grid(i));
      s2[i] = std::sin(5.5 * M_PI * grid(i));
    }
    s1 /= s1.norm();
    s2 /= s2.norm();
    y = scale * (1.25 * s1 + 0.7 * s2);
  } else if (profile.rfind("list:", 0) == 0) {
    const Vector v = parse_vector(profile.substr(5));
    require(v.size() == dim, ErrorCode::parse,
            "problem.y list length " + std::to_string(v.size()) +
                " does not match problem.dim " + std::to_string(dim));
    y = scale * v;
  } else {
    fail(ErrorCode::parse, "problem.y: unknown profile '" + profile +
                               "' (use ones, sin, mixed or list:...)");
  }
  return y;
}

}  // namespace dsm

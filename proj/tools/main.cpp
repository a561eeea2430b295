// Command-line surface: build models, run the verification suite, solve
// Robin problems by both routes, search spectra, and emit DtN data.
//
// Exit codes: 0 pass, 1 verified failure or spectral-point error (with a
// machine-readable reason), 2 usage or I/O error.

#include "qbt/models.hpp"
#include "qbt/serialize.hpp"
#include "qbt/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace qbt;

// --------------------------------------------------------------------------
// Small parsers

// Accepts "1", "-2.5", "2i", "1+2i", "1-2i", "i", "-i".
Complex parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw CLI::ValidationError("empty complex literal");
  auto parse_part = [](const std::string& t) -> double {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return std::stod(t);
  };
  if (s.back() == 'i' || s.back() == 'j') {
    const std::string body = s.substr(0, s.size() - 1);
    // split into real and imaginary text at the last +/- that is not an exponent sign
    for (size_t k = body.size(); k-- > 1;) {
      const char c = body[k];
      if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
        return {std::stod(body.substr(0, k)), parse_part(body.substr(k))};
      }
    }
    return {0.0, parse_part(body)};
  }
  return {std::stod(s), 0.0};
}

std::vector<Complex> parse_complex_list(const std::string& s) {
  std::vector<Complex> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(parse_complex(item));
  }
  return out;
}

std::map<std::string, std::string> parse_kv(const std::vector<std::string>& tokens) {
  std::map<std::string, std::string> kv;
  for (const std::string& t : tokens) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("expected key=value, got " + t);
    kv[t.substr(0, eq)] = t.substr(eq + 1);
  }
  return kv;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              double dflt) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : std::stod(it->second);
}

// Model source: builtin "kind key=value ..." or a JSON file path.
TripleModel build_model(const std::string& spec, std::uint64_t default_seed) {
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
    return load_model(spec);
  }
  std::stringstream ss(spec);
  std::string kind;
  ss >> kind;
  std::vector<std::string> rest;
  std::string tok;
  while (ss >> tok) rest.push_back(tok);
  const auto kv = parse_kv(rest);

  if (kind == "sl1d") {
    const int n = static_cast<int>(kv_num(kv, "N", 16));
    const double q = kv_num(kv, "q", 0.0);
    const double p = kv_num(kv, "p", 1.0);
    return models::sturm_liouville_1d(models::Coefficients1D::sample(
        n, [p](double) { return p; }, [q](double) { return q; }));
  }
  if (kind == "cd1d") {
    const int n = static_cast<int>(kv_num(kv, "N", 32));
    const double a = kv_num(kv, "a", 1.0);
    const double b = kv_num(kv, "b", 1.0);
    Complex c(0.0, 0.0);
    if (auto it = kv.find("c"); it != kv.end()) c = parse_complex(it->second);
    return models::convection_diffusion_1d(models::Coefficients1D::sample_cd(
        n, [a](double) { return a; }, [b](double) { return b; },
        [c](double) { return c; }));
  }
  if (kind == "elliptic2d" || kind == "e2d") {
    models::Grid2D grid;
    grid.nx = static_cast<int>(kv_num(kv, "Nx", 12));
    grid.ny = static_cast<int>(kv_num(kv, "Ny", 12));
    grid.lx = kv_num(kv, "Lx", 1.0);
    grid.ly = kv_num(kv, "Ly", 1.0);
    grid.b1 = kv_num(kv, "b1", 0.0);
    grid.b2 = kv_num(kv, "b2", 0.0);
    if (auto it = kv.find("q"); it != kv.end()) grid.q = parse_complex(it->second);
    return models::elliptic_2d(grid);
  }
  if (kind == "synthetic" || kind == "synth") {
    const auto seed = static_cast<std::uint64_t>(kv_num(kv, "seed",
                                                        static_cast<double>(default_seed)));
    return models::synthetic_pair(seed, static_cast<int>(kv_num(kv, "n", 8)),
                                  static_cast<int>(kv_num(kv, "m", 3)));
  }
  throw CLI::ValidationError("unknown model kind '" + kind +
                             "' (expected sl1d | cd1d | elliptic2d | synthetic | *.json)");
}

BoundaryParameter build_param(const std::string& spec, Index m) {
  if (spec.empty()) return BoundaryParameter::robin(1.0, m);
  if (spec == "dirichlet") return BoundaryParameter::dirichlet(m);
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
    std::ifstream in(spec);
    if (!in) throw std::runtime_error("cannot open parameter file " + spec);
    nlohmann::json doc;
    in >> doc;
    ComplexMatrix b1 = doc.contains("b1") ? matrix_from_json(doc.at("b1"))
                                          : ComplexMatrix::Identity(m, m);
    ComplexMatrix b2 = matrix_from_json(doc.at("b2"));
    return BoundaryParameter::factored(std::move(b1), std::move(b2), spec);
  }
  if (spec.rfind("theta=", 0) == 0) {
    return BoundaryParameter::robin(parse_complex(spec.substr(6)), m);
  }
  throw CLI::ValidationError("unknown --param spec '" + spec +
                             "' (expected theta=<complex> | dirichlet | *.json)");
}

// --------------------------------------------------------------------------
// Output helpers

std::string timestamp_line() {
  const auto now = std::chrono::system_clock::now();
  return "# timestamp: " +
         std::to_string(std::chrono::duration_cast<std::chrono::seconds>(
                            now.time_since_epoch())
                            .count());
}

void write_text(const std::string& out_path, const std::string& body) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out << body;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;

  std::string to_csv(bool with_timestamp) const {
    std::ostringstream os;
    if (with_timestamp) os << timestamp_line() << "\n";
    for (const std::string& c : comments) os << "# " << c << "\n";
    for (size_t i = 0; i < columns.size(); ++i) {
      os << columns[i] << (i + 1 < columns.size() ? "," : "");
    }
    os << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        os << fmt(row[i]) << (i + 1 < row.size() ? "," : "");
      }
      os << "\n";
    }
    return os.str();
  }

  std::string to_json(bool with_timestamp) const {
    nlohmann::ordered_json doc;
    if (with_timestamp) {
      doc["timestamp"] = static_cast<long long>(
          std::chrono::duration_cast<std::chrono::seconds>(
              std::chrono::system_clock::now().time_since_epoch())
              .count());
    }
    doc["comments"] = comments;
    doc["columns"] = columns;
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
  }

  std::string render(const std::string& format, bool with_timestamp) const {
    return format == "json" ? to_json(with_timestamp) : to_csv(with_timestamp);
  }
};

int emit_reason(const std::string& reason, const std::string& out_path) {
  nlohmann::ordered_json doc;
  doc["error"] = reason;
  const std::string body = doc.dump(2) + "\n";
  std::cerr << body;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (out) out << body;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite boundary-triple models: verification, Robin solvers, spectra, DtN data"};
  app.require_subcommand(1);

  std::string model_spec;
  std::string param_spec;
  std::string out_path;
  std::string format = "csv";
  std::string probes_spec;
  std::uint64_t seed = 1;
  bool no_timestamp = false;
  double tol_override = 0.0;

  app.add_option("--model", model_spec, "builtin spec (e.g. \"sl1d N=16\") or model JSON path")
      ->required();
  app.add_option("--param", param_spec, "boundary parameter: theta=<complex> | dirichlet | JSON path");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "output format for tables: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--probes", probes_spec, "semicolon-separated complex probe list");
  app.add_option("--seed", seed, "seed for synthetic models");
  app.add_option("--tol", tol_override, "override the search/rank tolerance")
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-timestamp", no_timestamp, "suppress the timestamp field");

  app.fallthrough();
  auto* cmd_verify = app.add_subcommand("verify", "run the full identity suite");
  auto* cmd_solve = app.add_subcommand("solve", "solve the Robin problem via direct and Krein routes");
  auto* cmd_eig = app.add_subcommand("eig", "locate point spectrum of A_B in a region");
  auto* cmd_dtn = app.add_subcommand("dtn", "emit Weyl (DtN) matrix entries at probe points");
  auto* cmd_sweep = app.add_subcommand("sweep", "eigenvalue trajectories over theta*I");

  std::string lambda_spec = "-1";
  std::string rhs_spec = "e1";
  cmd_solve->add_option("--lambda", lambda_spec, "spectral parameter")->required();
  cmd_solve->add_option("--rhs", rhs_spec, "right-hand side: e<k> | ones");

  std::string region_spec = "0,60,-1,1";
  int grid = 24;
  cmd_eig->add_option("--region", region_spec, "re_min,re_max,im_min,im_max");
  cmd_eig->add_option("--grid", grid, "grid points per axis for the scan");
  cmd_sweep->add_option("--region", region_spec, "re_min,re_max,im_min,im_max");
  cmd_sweep->add_option("--grid", grid, "grid points per axis for the scan");

  std::string dtn_lambdas = "-1;-2";
  cmd_dtn->add_option("--lambda", dtn_lambdas, "semicolon-separated lambda list");

  std::string theta_range = "0.1:1.0:10";
  cmd_sweep->add_option("--theta", theta_range, "start:stop:count for the real Robin family");

  CLI11_PARSE(app, argc, argv);

  TripleModel model = [&]() -> TripleModel {
    try {
      return build_model(model_spec, seed);
    } catch (const ConstructionError& e) {
      if (cmd_verify->parsed()) {
        // The source parsed but a structural invariant (e.g. the Green
        // identity of a corrupted file) failed: a verified failure.
        VerificationReport rep;
        rep.model_descriptor = model_spec;
        const std::string name =
            e.invariant().rfind("Green", 0) == 0 ? "green" : e.invariant();
        rep.add(name, "invariant violated while building the model", e.defect(),
                name == "green" ? tol::kGreen : 0.5);
        const std::string body = report_to_json(rep, !no_timestamp).dump(2) + "\n";
        write_text(out_path, body);
        std::exit(1);
      }
      std::cerr << "model load failure: " << e.what() << "\n";
      std::exit(2);
    } catch (const std::exception& e) {
      std::cerr << "model load failure: " << e.what() << "\n";
      std::exit(2);
    }
  }();

  try {
    const BoundaryParameter param = build_param(param_spec, model.m());

    if (cmd_verify->parsed()) {
      VerifyOptions opts;
      if (!probes_spec.empty()) opts.probes = parse_complex_list(probes_spec);
      if (tol_override > 0) opts.newton_tol = tol_override;
      const VerificationReport report = run_verification_suite(model, opts);
      const std::string body = report_to_json(report, !no_timestamp).dump(2) + "\n";
      write_text(out_path, body);
      if (!out_path.empty()) {
        std::cerr << (report.pass() ? "PASS " : "FAIL ") << report.model_descriptor << ": "
                  << report.entries.size() << " checks -> " << out_path << "\n";
      }
      return report.pass() ? 0 : 1;
    }

    if (cmd_solve->parsed()) {
      const Complex lambda = parse_complex(lambda_spec);
      ComplexVector h;
      if (rhs_spec == "ones") {
        h = ComplexVector::Ones(model.n());
      } else if (rhs_spec.size() > 1 && rhs_spec[0] == 'e') {
        const Index k = std::stol(rhs_spec.substr(1));
        if (k < 1 || k > model.n()) throw CLI::ValidationError("rhs index out of range");
        h = ComplexVector::Zero(model.n());
        h(k - 1) = 1.0;
      } else {
        throw CLI::ValidationError("unknown --rhs spec " + rhs_spec);
      }

      RestrictedSolve direct;
      ComplexVector krein;
      try {
        // Krein route first: at a Robin eigenvalue inside rho(A0) it is the
        // Birman-Schwinger operator that is singular, which is the reason to
        // report; the direct stack is singular there as well.
        krein = krein_resolvent(model, param, lambda, h);
        direct = ab_resolvent_solve(model, param, lambda, h);
      } catch (const SingularMatrixError&) {
        return emit_reason("birman-schwinger singular", out_path);
      } catch (const ResolventPointError&) {
        return emit_reason("spectral point: lambda outside the resolvent set", out_path);
      }

      const double scale = std::max(model.space_h().norm(direct.u), 1e-300);
      const double deviation = model.space_h().norm(direct.u - krein) / scale;
      const ComplexVector bres = param.product() * (model.g1() * direct.f_dom) -
                                 model.g0() * direct.f_dom;

      Table t;
      t.columns = {"index", "re(u_direct)", "im(u_direct)", "re(u_krein)", "im(u_krein)"};
      for (Index i = 0; i < model.n(); ++i) {
        t.rows.push_back({static_cast<double>(i), direct.u(i).real(), direct.u(i).imag(),
                          krein(i).real(), krein(i).imag()});
      }
      t.comments.push_back("model: " + model.info().descriptor);
      t.comments.push_back("param: " + param.label);
      t.comments.push_back("lambda: " + fmt(lambda.real()) + (lambda.imag() < 0 ? "" : "+") +
                           fmt(lambda.imag()) + "i");
      t.comments.push_back("krein_vs_direct_relative_deviation: " + fmt(deviation));
      t.comments.push_back("boundary_residual: " + fmt(bres.norm()));
      write_text(out_path, t.render(format, !no_timestamp));
      return deviation <= tol::kKrein ? 0 : 1;
    }

    if (cmd_eig->parsed() || cmd_sweep->parsed()) {
      SearchRegion region;
      {
        std::stringstream ss(region_spec);
        char comma;
        if (!(ss >> region.re_min >> comma >> region.re_max >> comma >> region.im_min >>
              comma >> region.im_max)) {
          throw CLI::ValidationError("bad --region spec " + region_spec);
        }
      }
      const double newton_tol = tol_override > 0 ? tol_override : 1e-11;

      if (cmd_eig->parsed()) {
        const EigenvalueSearchResult res =
            eigenvalue_search(model, param, region, grid, newton_tol);
        Table t;
        t.columns = {"root_re", "root_im", "bs_residual", "pencil_distance", "multiplicity"};
        for (const EigenvalueHit& hit : res.roots) {
          t.rows.push_back({hit.lambda.real(), hit.lambda.imag(), hit.bs_residual,
                            hit.pencil_distance, static_cast<double>(hit.multiplicity)});
        }
        t.comments.push_back("model: " + model.info().descriptor);
        t.comments.push_back("param: " + param.label);
        for (const std::string& w : res.warnings) t.comments.push_back("warning: " + w);
        write_text(out_path, t.render(format, !no_timestamp));
        return 0;
      }

      // sweep over theta * I
      double th0 = 0.1, th1 = 1.0;
      int count = 10;
      {
        std::stringstream ss(theta_range);
        char colon;
        if (!(ss >> th0 >> colon >> th1 >> colon >> count) || count < 1) {
          throw CLI::ValidationError("bad --theta spec " + theta_range);
        }
      }
      Table t;
      t.columns = {"theta", "root_re", "root_im", "bs_residual"};
      t.comments.push_back("model: " + model.info().descriptor);
      for (int k = 0; k < count; ++k) {
        const double th = count == 1 ? th0 : th0 + (th1 - th0) * k / (count - 1);
        const BoundaryParameter pk = BoundaryParameter::robin(th, model.m());
        const EigenvalueSearchResult res =
            eigenvalue_search(model, pk, region, grid, newton_tol);
        for (const EigenvalueHit& hit : res.roots) {
          t.rows.push_back({th, hit.lambda.real(), hit.lambda.imag(), hit.bs_residual});
        }
      }
      write_text(out_path, t.render(format, !no_timestamp));
      return 0;
    }

    if (cmd_dtn->parsed()) {
      Table t;
      t.columns = {"lambda_re", "lambda_im", "i", "j", "re", "im"};
      t.comments.push_back("model: " + model.info().descriptor);
      t.comments.push_back("entries of M(lambda) in the W_G-orthonormal frame");
      for (Complex l : parse_complex_list(dtn_lambdas)) {
        const SpectralSample s = gamma(model, l);
        for (Index i = 0; i < model.m(); ++i) {
          for (Index j = 0; j < model.m(); ++j) {
            t.rows.push_back({l.real(), l.imag(), static_cast<double>(i),
                              static_cast<double>(j), s.weyl(i, j).real(),
                              s.weyl(i, j).imag()});
          }
        }
      }
      write_text(out_path, t.render(format, !no_timestamp));
      return 0;
    }
  } catch (const ResolventPointError& e) {
    return emit_reason(std::string("spectral point: ") + e.what(), out_path);
  } catch (const SingularMatrixError&) {
    return emit_reason("birman-schwinger singular", out_path);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

// hardy: command-line front end.
//
//   hardy params             --N 4 --p 2 --lambda -1
//   hardy critical-spectrum  --N 3 --j-max 4
//   hardy radial             --N 4 --p 2 --lambda -1 --grid 2048 --output u.csv
//   hardy bifurcate          --N 4 --p 2 --k-range 1..3
//   hardy verify             --N 4 --critical --lambda -1
//   hardy diagram            --N 3 --critical --lambda-range -0.6:-0.1:3
//
// Any subcommand accepts --config FILE, a flat JSON object keyed by long flag
// names; flags given on the command line win.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "canonical_json.hpp"
#include "commands.hpp"

namespace {

using hardy::cli::Exit;

// Turns {"N": 4, "critical": true} into {"--N", "4", "--critical"}.
std::vector<std::string> config_args(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw hardy::ParameterError("cannot open config file '" + path + "'");
  hardy::io::json j;
  try {
    in >> j;
  } catch (std::exception const& e) {
    throw hardy::ParameterError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw hardy::ParameterError("config file must hold a flat JSON object");
  std::vector<std::string> args;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string const flag = "--" + it.key();
    auto const& v = it.value();
    if (v.is_boolean()) {
      args.push_back(flag + (v.get<bool>() ? "" : "=false"));
    } else if (v.is_number_integer()) {
      args.push_back(flag);
      args.push_back(std::to_string(v.get<long long>()));
    } else if (v.is_number()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      args.push_back(flag);
      args.push_back(buf);
    } else if (v.is_string()) {
      args.push_back(flag);
      args.push_back(v.get<std::string>());
    } else {
      throw hardy::ParameterError("config key '" + it.key() + "' must be a scalar");
    }
  }
  return args;
}

// argv with --config expanded in place of itself, right after the subcommand.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> in(argv, argv + argc), out;
  std::vector<std::string> injected;
  for (std::size_t i = 0; i < in.size(); ++i) {
    std::string const& a = in[i];
    if (a == "--config") {
      if (i + 1 >= in.size()) throw hardy::ParameterError("--config needs a file argument");
      auto extra = config_args(in[++i]);
      injected.insert(injected.end(), extra.begin(), extra.end());
    } else if (a.rfind("--config=", 0) == 0) {
      auto extra = config_args(a.substr(9));
      injected.insert(injected.end(), extra.begin(), extra.end());
    } else {
      out.push_back(a);
    }
  }
  if (!injected.empty() && out.size() >= 2) out.insert(out.begin() + 2, injected.begin(), injected.end());
  return out;
}

void add_params(CLI::App* sub, hardy::cli::ParamFlags& f, bool need_lambda = true) {
  sub->add_option("--N", f.N, "dimension N >= 3")->required();
  sub->add_option("--p", f.p, "exponent 1 < p <= (N+2)/(N-2)");
  sub->add_flag("--critical", f.critical, "use p = (N+2)/(N-2)");
  auto* l = sub->add_option("--lambda", f.lambda, "Hardy parameter lambda < (N-2)^2/4");
  if (need_lambda) l->required();
}

class Sink {
 public:
  explicit Sink(std::string const& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw hardy::ParameterError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void write_text(std::string const& path, std::string const& text) {
  std::ofstream f(path);
  if (!f) throw hardy::ParameterError("cannot write '" + path + "'");
  f << text;
}

// k-range "a..b", "a:b" or a single "k".
void parse_k_range(std::string const& s, int& lo, int& hi) {
  std::string t = s;
  auto pos = t.find("..");
  if (pos != std::string::npos) t.replace(pos, 2, " ");
  for (char& c : t) {
    if (c == ':') c = ' ';
  }
  std::istringstream in(t);
  if (!(in >> lo)) throw hardy::ParameterError("--k-range must look like 1..3, got '" + s + "'");
  if (!(in >> hi)) hi = lo;
  if (!in.eof() && !(in >> std::ws).eof()) {
    throw hardy::ParameterError("--k-range must look like 1..3, got '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = hardy::cli;
  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (hardy::Error const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::bad_parameters;
  }

  CLI::App app{"Numerical laboratory for -Δu - λ/|x|² u = u^p"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string output;

  cli::ParamFlags pf;
  auto* params = app.add_subcommand("params", "transform coefficients as JSON");
  add_params(params, pf);
  params->add_option("--output", output, "output file (default stdout)");

  int spec_N = 0, j_max = 6;
  auto* spectrum = app.add_subcommand("critical-spectrum", "degeneracy values lambda_j as CSV");
  spectrum->add_option("--N", spec_N, "dimension N >= 3")->required();
  spectrum->add_option("--j-max", j_max, "largest degree j");
  spectrum->add_option("--output", output, "output file (default stdout)");

  cli::RadialFlags rf;
  std::string sidecar;
  auto* radial = app.add_subcommand("radial", "radial solution as CSV plus JSON sidecar");
  add_params(radial, rf.params);
  radial->add_option("--grid", rf.grid, "number of output nodes");
  radial->add_option("--output", output, "CSV file (default stdout)");
  radial->add_option("--sidecar", sidecar, "sidecar JSON file (default OUTPUT.json, else stderr)");

  cli::BifurcateFlags bf;
  std::string k_range = "1..3";
  auto* bifurcate = app.add_subcommand("bifurcate", "subcritical degeneracy values lambda_k as JSON");
  add_params(bifurcate, bf.params, false);
  bifurcate->add_option("--k-range", k_range, "degrees, e.g. 1..3");
  bifurcate->add_option("--mesh", bf.mesh, "eigenvalue mesh nodes");
  bifurcate->add_option("--scan-n", bf.scan_n, "scan points in |lambda|");
  bifurcate->add_option("--output", output, "output file (default stdout)");

  cli::VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "verification report as JSON");
  add_params(verify, vf.params);
  verify->add_option("--grid", vf.options.grid_n, "residual grid nodes");
  verify->add_option("--quad-grid", vf.options.quad.n, "quadrature grid nodes");
  verify->add_option("--mesh", vf.options.mesh_n, "eigenvalue mesh nodes");
  verify->add_option("--output", output, "output file (default stdout)");

  cli::DiagramFlags df;
  auto* diagram = app.add_subcommand("diagram", "lambda sweep as CSV");
  add_params(diagram, df.params, false);
  diagram->add_option("--lambda-range", df.lambda_range, "lo:hi:n")->required();
  diagram->add_option("--mesh", df.mesh, "eigenvalue mesh nodes");
  diagram->add_option("--output", output, "output file (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return Exit::bad_parameters;
  }

  try {
    if (params->parsed()) {
      Sink s(output);
      return cli::cmd_params(pf, s.stream());
    }
    if (spectrum->parsed()) {
      Sink s(output);
      return cli::cmd_critical_spectrum(spec_N, j_max, s.stream());
    }
    if (radial->parsed()) {
      std::ostringstream csv;
      std::string const side = hardy::io::to_canonical(cli::cmd_radial(rf, csv));
      Sink s(output);
      s.stream() << csv.str();
      std::string const side_path = !sidecar.empty() ? sidecar : (output.empty() ? "" : output + ".json");
      if (side_path.empty()) {
        std::cerr << side;
      } else {
        write_text(side_path, side);
      }
      return Exit::ok;
    }
    if (bifurcate->parsed()) {
      parse_k_range(k_range, bf.k_min, bf.k_max);
      Sink s(output);
      return cli::cmd_bifurcate(bf, s.stream());
    }
    if (verify->parsed()) {
      Sink s(output);
      return cli::cmd_verify(vf, s.stream());
    }
    if (diagram->parsed()) {
      Sink s(output);
      return cli::cmd_diagram(df, s.stream());
    }
  } catch (hardy::ParameterError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::bad_parameters;
  } catch (hardy::DomainError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::bad_parameters;
  } catch (hardy::PreconditionError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::bad_parameters;
  } catch (hardy::RangeError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::incomplete_scan;
  } catch (hardy::Error const& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return Exit::solver_failed;
  }
  return Exit::ok;
}

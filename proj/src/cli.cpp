#include "pathlift/cli.hpp"

#include "pathlift/errors.hpp"
#include "pathlift/scene_model.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace pathlift::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string command;
  std::string scene_path;
  std::optional<double> step;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<double> tolerance;
};

struct Output {
  std::string text;
  int status = kSuccess;
  std::string message;  // reported on stderr when status is not success
};

std::string csv_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, r.ptr};
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
  text += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_number(row[i]);
    text += '\n';
  }
  return text;
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json rows_json(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[header[i]] = row[i];
    out.push_back(std::move(obj));
  }
  return out;
}

std::vector<double> uniform_grid(const Interval& d, int points) {
  if (points < 2) throw ValidationError("task.grid must be at least 2");
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) grid.push_back(k + 1 == points ? d.hi : d.lo + (d.hi - d.lo) * k / (points - 1));
  return grid;
}

std::string format_for(const Options& opt, const SceneModel& model, const std::string& fallback,
                       std::initializer_list<const char*> allowed) {
  const std::string f = opt.format ? *opt.format : model.scene().output.format.value_or(fallback);
  if (std::none_of(allowed.begin(), allowed.end(), [&f](const char* a) { return f == a; })) {
    throw ValidationError("format '" + f + "' is not available for '" + opt.command + "'");
  }
  return f;
}

Output cmd_transport(const Options& opt, const SceneModel& model) {
  format_for(opt, model, "json", {"json"});
  const double s = model.s0();
  const double t = model.t();
  const auto in = model.tensor(s);
  TensorComponents result = in;
  if (in.p() + in.q() == 0) {
    result = TensorComponents::scalar(scalar_transport(model.tensor_rule(), t, s, in.components()[0]), in.dim(), t);
  } else {
    result = transport_tensor(model.tensor_rule(), in, t, s);
  }
  Json j = Json::object();
  j["command"] = "transport";
  j["s"] = s;
  j["t"] = t;
  j["p"] = result.p();
  j["q"] = result.q();
  j["components"] = nest_tensor_components(result.components(), result.p() + result.q(), result.dim());
  return {json_text(j)};
}

Output cmd_solve_section(const Options& opt, const SceneModel& model) {
  const auto format = format_for(opt, model, "csv", {"csv", "json"});
  const auto grid = uniform_grid(model.domain(), model.grid(21));
  const auto solved = solve_transport_equation(model.coefficients(), model.vector(), model.s0(), grid, model.steps());
  std::vector<std::string> header{"s"};
  for (int i = 1; i <= model.dim(); ++i) header.push_back("sigma" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> row{grid[k]};
    row.insert(row.end(), solved.values[k].data(), solved.values[k].data() + solved.values[k].size());
    rows.push_back(std::move(row));
  }
  if (format == "csv") return {csv(header, rows)};
  Json j = Json::object();
  j["command"] = "solve-section";
  j["s0"] = model.s0();
  j["rows"] = rows_json(header, rows);
  return {json_text(j)};
}

Output cmd_lpath(const Options& opt, const SceneModel& model) {
  const auto format = format_for(opt, model, "csv", {"csv", "json"});
  const LPathProblem problem{model.chart(), model.provider(), model.x0(), model.velocity0(), model.s0(),
                             model.domain()};
  const auto sol = solve_lpath(problem, model.steps());
  std::vector<std::string> header{"s"};
  for (int i = 1; i <= model.dim(); ++i) header.push_back("x" + std::to_string(i));
  for (int i = 1; i <= model.dim(); ++i) header.push_back("v" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (const auto& sample : sol.samples) {
    std::vector<double> row{sample.s};
    row.insert(row.end(), sample.x.data(), sample.x.data() + sample.x.size());
    row.insert(row.end(), sample.v.data(), sample.v.data() + sample.v.size());
    rows.push_back(std::move(row));
  }
  Output out;
  if (format == "csv") {
    out.text = csv(header, rows);
  } else {
    Json j = Json::object();
    j["command"] = "lpath";
    j["method"] = sol.method;
    j["step"] = sol.step;
    j["truncated"] = sol.truncated;
    j["rows"] = rows_json(header, rows);
    out.text = json_text(j);
  }
  if (sol.truncated) {
    out.status = kNumericalFailure;
    out.message = "lpath truncated: " + sol.truncation_reason;
  }
  return out;
}

Output cmd_frame(const Options& opt, const SceneModel& model) {
  const auto format = format_for(opt, model, "csv", {"csv", "json"});
  const auto gen = model.generator();
  const auto frame = special_frame(gen);
  const auto fam = model.family();
  const auto reexpressed = change_transport_frame(fam, [frame](double s) { return frame.basis(s); });
  const double s0 = model.s0();
  const int n = model.dim();
  const auto grid = uniform_grid(model.domain(), model.grid(21));
  std::vector<std::string> header{"s"};
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) header.push_back("e" + std::to_string(i) + "_" + std::to_string(j));
  header.push_back("identity_deviation");
  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (const double s : grid) {
    const Matrix b = frame.basis(s);
    std::vector<double> row{s};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) row.push_back(b(j, i));
    const double dev = max_abs(reexpressed(s, s0) - Matrix::Identity(n, n));
    worst = std::max(worst, dev);
    row.push_back(dev);
    rows.push_back(std::move(row));
  }
  if (format == "csv") return {csv(header, rows)};
  Json j = Json::object();
  j["command"] = "frame";
  j["s0"] = s0;
  j["identity_deviation"] = worst;
  j["rows"] = rows_json(header, rows);
  return {json_text(j)};
}

Output cmd_holonomy(const Options& opt, const SceneModel& model) {
  format_for(opt, model, "json", {"json"});
  const Matrix h = holonomy(model.family(), model.path());
  const int n = model.dim();
  Json j = Json::object();
  j["command"] = "holonomy";
  j["s"] = model.domain().lo;
  j["t"] = model.domain().hi;
  j["matrix"] = matrix_json(h);
  j["deviation_from_identity"] = max_abs(h - Matrix::Identity(n, n));
  return {json_text(j)};
}

Output cmd_check(const Options& opt, const SceneModel& model, std::uint64_t seed) {
  format_for(opt, model, "json", {"json"});
  const auto report = run_check_suite(model, seed, opt.tolerance);
  Json laws = Json::array();
  for (const auto& law : report.laws) {
    Json l = Json::object();
    l["id"] = law.id;
    l["name"] = law.name;
    l["max_deviation"] = law.max_deviation;
    l["tolerance"] = law.tolerance;
    l["pass"] = law.pass;
    laws.push_back(std::move(l));
  }
  Json j = Json::object();
  j["command"] = "check";
  j["seed"] = report.seed;
  j["pass"] = report.pass();
  j["laws"] = std::move(laws);
  Output out{json_text(j)};
  if (const auto* fail = report.first_failure()) {
    out.status = kCheckFailure;
    out.message = "check failed: " + fail->name + " (" + fail->id + "): max deviation " +
                  format_shortest(fail->max_deviation) + " exceeds tolerance " + format_shortest(fail->tolerance);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read scene file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::uint64_t seed_from_environment() {
  const char* env = std::getenv("PATHLIFT_SEED");
  if (!env) return kDefaultSeed;
  const std::string_view text(env);
  std::uint64_t seed = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) return kDefaultSeed;
  return seed;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::uint64_t seed) {
  Options opt;
  CLI::App app{"Linear transports along paths", "pathlift"};
  app.add_option("command", opt.command, "transport | solve-section | lpath | frame | holonomy | check")
      ->required()
      ->check(CLI::IsMember({"transport", "solve-section", "lpath", "frame", "holonomy", "check"}));
  app.add_option("--scene", opt.scene_path, "Scene file (text or JSON)")->required();
  app.add_option("--step", opt.step, "RK4 step bound");
  app.add_option("--out", opt.out, "Output file");
  app.add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--tolerance", opt.tolerance, "Uniform tolerance for check");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationFailure;
  }

  try {
    const SceneModel model(parse_scene(read_file(opt.scene_path)), opt.step);
    Output result;
    if (opt.command == "transport") {
      result = cmd_transport(opt, model);
    } else if (opt.command == "solve-section") {
      result = cmd_solve_section(opt, model);
    } else if (opt.command == "lpath") {
      result = cmd_lpath(opt, model);
    } else if (opt.command == "frame") {
      result = cmd_frame(opt, model);
    } else if (opt.command == "holonomy") {
      result = cmd_holonomy(opt, model);
    } else {
      result = cmd_check(opt, model, seed);
    }

    const auto destination = opt.out ? opt.out : model.scene().output.destination;
    if (destination && *destination != "-") {
      std::ofstream file(*destination, std::ios::binary);
      if (!file) throw ValidationError("cannot write '" + *destination + "'");
      file << result.text;
    } else {
      out << result.text;
    }
    if (result.status != kSuccess) err << "pathlift: " << result.message << '\n';
    return result.status;
  } catch (const ValidationError& e) {
    err << "pathlift: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const NumericalError& e) {
    err << "pathlift: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "pathlift: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace pathlift::cli

// tailcalc <command> --in spec.json --out report.json [--mode exact|float] [--pretty]

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tailcalc/cli.hpp"

namespace {

using tailcalc::io::json;

// Writes through a temporary file so a failed run never leaves partial output.
bool write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) return false;
    os << text;
    if (!os.flush()) return false;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  return !ec;
}

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order tail expansions of weighted sums of heavy-tailed variables"};
  app.require_subcommand(1, 1);
  std::string in_path, out_path, mode = "exact";
  bool pretty = false;
  for (const auto& name : tailcalc::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--in", in_path, "problem description (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "report path (JSON)")->required();
    sub->add_option("--mode", mode, "coefficient field")->check(CLI::IsMember({"exact", "float"}));
    sub->add_flag("--pretty", pretty, "indent the report");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : tailcalc::cli::parse_error;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  json input;
  {
    std::ifstream is(in_path);
    std::stringstream buf;
    buf << is.rdbuf();
    input = json::parse(buf.str(), nullptr, false);
  }
  if (input.is_discarded()) {
    std::cerr << "tailcalc: " << in_path << ": malformed JSON\n";
    return tailcalc::cli::parse_error;
  }

  const auto start = std::chrono::steady_clock::now();
  tailcalc::cli::Outcome o =
      tailcalc::cli::run(command, input, mode == "exact" ? tailcalc::io::Mode::exact : tailcalc::io::Mode::floating);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.report.is_null()) {
    std::cerr << "tailcalc: " << o.error << "\n";
    return o.code;
  }

  const std::filesystem::path out(out_path);
  std::string text = o.report.dump(pretty ? 2 : -1) + "\n";
  if (!write_atomic(out, text)) {
    std::cerr << "tailcalc: cannot write " << out_path << "\n";
    return tailcalc::cli::internal;
  }
  if (!o.csv.empty()) {
    std::filesystem::path csv = out;
    csv += ".csv";
    write_atomic(csv, o.csv);
  }
  json meta{{"command", command},   {"mode", mode},
            {"input", in_path},      {"finished_utc", utc_now()},
            {"seconds", seconds},    {"exit_code", o.code},
            {"threads", tailcalc::oracle_threads()}};
  std::filesystem::path meta_path = out;
  meta_path += ".meta.json";
  write_atomic(meta_path, meta.dump(2) + "\n");
  if (o.code != 0) std::cerr << "tailcalc: classification needs a higher-order expansion\n";
  return o.code;
}

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qinv/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-Hermitian invariants of driven su(2) / su(1,1) Hamiltonians"};
  app.set_version_flag("--version", std::string(QINV_VERSION));
  app.require_subcommand(1);

  qinv::cli::Invocation inv;
  std::string format;
  for (const char* name : {"verify", "solve", "phases", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", inv.config_path, "flat JSON run configuration")->required();
    sub->add_option("--out", inv.out_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", inv.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qinv::cli::kConfigError;
  }
  inv.command = app.get_subcommands().front()->get_name();
  if (!format.empty()) inv.format = format;
  return qinv::cli::execute(inv, std::cout, std::cerr);
}

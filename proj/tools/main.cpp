#include <iostream>

#include "common.hpp"
#include "tpx/error.hpp"

// Exit codes: 0 success, 2 configuration/usage error, 3 evaluation failure,
// 4 non-convergence (measurement never settled, or the search hit its
// iteration cap).
int main(int argc, char** argv) {
  CLI::App app{"tpx - coding-tool profile exploration for energy-aware video pipelines"};
  app.require_subcommand(1);
  app.set_config("--config-file", "", "read options from an INI/TOML file");

  int exit_code = 0;
  tpxcli::register_bd(app, exit_code);
  tpxcli::register_dse(app, exit_code);
  tpxcli::register_measure(app, exit_code);
  tpxcli::register_profile(app, exit_code);
  tpxcli::register_sensitivity(app, exit_code);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help and --version are not errors
  } catch (const tpx::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tpx::EvalError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}

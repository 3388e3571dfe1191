#include "mpnsch/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

#include "mpnsch/config.hpp"
#include "mpnsch/driver.hpp"
#include "mpnsch/errors.hpp"
#include "mpnsch/scenarios.hpp"

namespace mpnsch {

namespace {

constexpr const char* kUsage =
    "usage:\n"
    "  mpnsch run <config>                 execute a configuration file\n"
    "  mpnsch scenario <name> [--emit-config]\n"
    "                                      run (or print) a named scenario\n"
    "  mpnsch sweep <config>               deep-quench temperature sweep\n"
    "  mpnsch check <config>               validate a configuration\n";

int finish(const RunResult& r) {
  if (r.exit_code == 0)
    std::cout << r.message << "\n";
  else
    std::cerr << r.message << "\n";
  return r.exit_code;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (args.empty()) {
      std::cerr << kUsage;
      return 2;
    }
    const std::string& cmd = args[0];
    if (cmd == "run") {
      if (args.size() != 2) {
        std::cerr << kUsage;
        return 2;
      }
      return finish(run_simulation(load_config(args[1])));
    }
    if (cmd == "scenario") {
      if (args.size() != 2 && args.size() != 3) {
        std::cerr << kUsage;
        return 2;
      }
      const RunConfig c = scenario(args[1]);
      if (args.size() == 3) {
        if (args[2] != "--emit-config") {
          std::cerr << "unknown option '" << args[2] << "'\n" << kUsage;
          return 2;
        }
        std::cout << render_config(c);
        return 0;
      }
      return finish(run_simulation(c));
    }
    if (cmd == "sweep") {
      if (args.size() != 2) {
        std::cerr << kUsage;
        return 2;
      }
      return finish(run_sweep(load_config(args[1])));
    }
    if (cmd == "check") {
      if (args.size() != 2) {
        std::cerr << kUsage;
        return 2;
      }
      const RunConfig c = load_config(args[1]);
      const Grid g = Grid::make(c.grid.Lx, c.grid.Ly, c.grid.nx, c.grid.ny);
      make_initial_state(g, c);
      std::cout << "ok: " << args[1] << " is runnable (" << c.grid.nx << "x"
                << c.grid.ny << " cells, " << c.n_steps << " steps)\n";
      return 0;
    }
    std::cerr << "unknown command '" << cmd << "'\n" << kUsage;
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace mpnsch

#pragma once

// Command-line entry point shared by the mpnsch tool and the tests.
//
//   mpnsch run <config>                  execute a configuration file
//   mpnsch scenario <name> [--emit-config]
//                                        run (or print) a named scenario
//   mpnsch sweep <config>                deep-quench temperature sweep
//   mpnsch check <config>                parse, validate, build the initial
//                                        state, report ok
//
// Exit codes: 0 success, 2 configuration error (parse, validation, unknown
// scenario, unusable files), 3 solver failure, 4 energy-ledger violation.

namespace mpnsch {

int run_cli(int argc, const char* const* argv);

}  // namespace mpnsch

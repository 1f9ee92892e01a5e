#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "collapse/errors.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "experiment config file (key=value lines)")
      ->required();
  sub->add_option("--set", args.overrides, "override a config key, e.g. --set seed=7");
  sub->add_option("--out", args.out_dir, "output directory")->required();
}

int dispatch(const std::string& name, const CommonArgs& args) {
  using namespace collapse::cli;
  ExperimentConfig config;
  try {
    config = load_config(args.config_path, args.overrides);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kInvalidConfig;
  }
  try {
    if (name == "decompose") return cmd_decompose(config, args.out_dir);
    if (name == "flow") return cmd_flow(config, args.out_dir);
    if (name == "closedform") return cmd_closedform(config, args.out_dir);
    return cmd_compare(config, args.out_dir);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kInvalidConfig;
  } catch (const collapse::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collapse: MSE neural-collapse decomposition, flows, and closed-form dynamics"};
  app.require_subcommand(1);

  CommonArgs decompose_args, flow_args, closedform_args, compare_args;
  add_common(app.add_subcommand("decompose", "loss decomposition audit along a simulated flow"),
             decompose_args);
  add_common(app.add_subcommand("flow", "continually renormalized gradient flow trajectory"),
             flow_args);
  add_common(app.add_subcommand("closedform", "implicit singular-value solution on a time grid"),
             closedform_args);
  add_common(app.add_subcommand("compare", "flow vs closed form with eta refinement"),
             compare_args);

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  const CommonArgs& args = name == "decompose"   ? decompose_args
                           : name == "flow"      ? flow_args
                           : name == "closedform" ? closedform_args
                                                  : compare_args;
  return dispatch(name, args);
}

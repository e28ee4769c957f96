// opa-sim: scenario runner for the three-mode parametric amplifier.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "opa/config.hpp"
#include "opa/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Three-mode optical parametric amplification simulator"};
    std::string config_file;
    std::string output_dir = ".";
    bool quiet = false;
    app.add_option("config", config_file, "key = value configuration file")->required();
    app.add_option("--output-dir", output_dir, "directory for CSV artifacts");
    app.add_flag("--quiet", quiet, "suppress the run summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : opa::kExitConfig;
    }

    std::ifstream in(config_file, std::ios::binary);
    if (!in) {
        std::cerr << "opa-sim: cannot read " << config_file << '\n';
        return opa::kExitIo;
    }
    std::ostringstream text;
    text << in.rdbuf();

    try {
        const opa::RunConfig config = opa::parse_config(text.str());
        const opa::RunReport report = opa::run(config, {output_dir});
        if (!quiet) std::cout << report.summary;
        return report.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "opa-sim: " << e.what() << '\n';
        return opa::exit_code_for(e);
    }
}

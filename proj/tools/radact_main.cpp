// Command line front end for the FMCW activity pipeline: synthesize scenes,
// transform them, segment, train and classify, end to end or stage by stage.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "radact/errors.hpp"
#include "radact/pipeline.hpp"
#include "radact/version.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "run";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
    auto* cfg = cmd->add_option("--config", opts.config_path, "pipeline config file");
    if (needs_config) cfg->required();
    cmd->add_option("--out", opts.out_dir, "run directory for artifacts");
    cmd->add_option("--seed", opts.seed, "override the config seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--jobs", opts.jobs, "worker threads (0 = hardware)");
}

radact::pipeline::PipelineConfig load_config(const CommonOpts& opts) {
    auto cfg = radact::pipeline::PipelineConfig::load(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.jobs > 0) cfg.jobs = opts.jobs;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMCW radar activity recognition pipeline"};
    app.set_version_flag("--version", std::string(radact::kVersion));
    app.require_subcommand(1);

    CommonOpts opts;
    bool csv_export = false;

    auto* c_sim = app.add_subcommand("simulate", "synthesize baseband scenes + manifest");
    add_common(c_sim, opts, true);
    auto* c_rm = app.add_subcommand("rangemap", "compute range maps from baseband files");
    add_common(c_rm, opts, true);
    c_rm->add_flag("--csv", csv_export, "also export range maps as CSV");
    auto* c_md = app.add_subcommand("spectrogram", "compute micro-Doppler spectrograms");
    add_common(c_md, opts, true);
    auto* c_seg = app.add_subcommand("segment", "detect lines, breakpoints and events");
    add_common(c_seg, opts, true);
    auto* c_train = app.add_subcommand("train", "build the corpus and train the classifier");
    add_common(c_train, opts, true);
    auto* c_cls = app.add_subcommand("classify", "run two-way decisions over recordings");
    add_common(c_cls, opts, true);
    auto* c_pipe = app.add_subcommand("pipeline", "run every stage and write the report");
    add_common(c_pipe, opts, true);
    auto* c_rep = app.add_subcommand("report", "render tables from an existing run");
    add_common(c_rep, opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        using namespace radact::pipeline;
        if (c_sim->parsed()) {
            cmd_simulate(load_config(opts), opts.out_dir, opts.jobs);
        } else if (c_rm->parsed()) {
            cmd_rangemap(load_config(opts), opts.out_dir, opts.jobs, csv_export);
        } else if (c_md->parsed()) {
            cmd_spectrogram(load_config(opts), opts.out_dir, opts.jobs);
        } else if (c_seg->parsed()) {
            cmd_segment(load_config(opts), opts.out_dir, opts.jobs);
        } else if (c_train->parsed()) {
            cmd_train(load_config(opts), opts.out_dir, opts.jobs);
        } else if (c_cls->parsed()) {
            cmd_classify(load_config(opts), opts.out_dir, opts.jobs);
        } else if (c_pipe->parsed()) {
            cmd_pipeline(load_config(opts), opts.out_dir, opts.jobs);
        } else if (c_rep->parsed()) {
            std::cout << cmd_report(opts.out_dir);
        }
    } catch (const radact::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const radact::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const radact::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

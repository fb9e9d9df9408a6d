// farscope: synthesize far-field scattering data for a two-region penetrable
// scatterer and reconstruct its support from the spectral indicator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "farscope/config.hpp"
#include "farscope/pipeline.hpp"

namespace {

constexpr const char* config_keys_help = R"(Config file: one "key = value" per line, '#' starts a comment.

  preset                example1 | example2 | example3 (baseline, overridable)
  curve                 kite | rounded_square | rounded_triangle | disk
  radius                disk radius (default 1)
  vertices              boundary polyline resolution (>= 64, default 512)
  offset_x, offset_y    curve translation (default 0)
  split_axis            x1 | x2   (coordinate defining the region split)
  d1_side               positive | negative (half-plane that is region 1)
  n1_re, n1_im          refractive index in region 1
  n2_re, n2_im          refractive index in region 2
  contrast_floor        minimum |Re(n)-1| accepted (default 0.01)
  k                     wavenumber (> 0)
  M                     direction count (even, >= 8)
  cells_per_wavelength  grid resolution (>= 8, default 12)
  h                     explicit grid step (overrides cells_per_wavelength)
  delta                 comma list of noise levels in [0,1)
  seed                  64-bit master seed
  window                auto | x0,x1,y0,y1  (reconstruction window)
  resolution            n | nx,ny  (indicator samples, >= 16)
  cutoff                eigenvalue cutoff relative to the largest (default 1e-12)
  out                   output directory
)";

farscope::RunConfig load_run_config(const std::string& config_path,
                                    const std::string& preset,
                                    const std::string& out_dir,
                                    const std::string& delta_list,
                                    const std::string& seed_str,
                                    const std::string& cutoff_str) {
    farscope::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw farscope::ConfigError("cannot open config file '" + config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        if (!preset.empty()) text = "preset = " + preset + "\n" + text;
        cfg = farscope::parse_config(text);
    } else if (!preset.empty()) {
        cfg = farscope::preset_config(preset);
    } else {
        throw farscope::ConfigError("give --config <file> and/or --preset <name>");
    }
    // command-line overrides, validated through the same path as file keys
    std::string overrides;
    if (!delta_list.empty()) overrides += "delta = " + delta_list + "\n";
    if (!seed_str.empty()) overrides += "seed = " + seed_str + "\n";
    if (!cutoff_str.empty()) overrides += "cutoff = " + cutoff_str + "\n";
    if (!overrides.empty()) {
        std::string base = farscope::canonical_text(cfg);
        cfg = farscope::parse_config(base + overrides);
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"far-field synthesis and support reconstruction workbench"};
    app.footer(config_keys_help);
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, delta_list, seed_str, cutoff_str;
    std::string ffmat_path;

    const auto add_common = [&](CLI::App* sub, bool with_input) {
        sub->add_option("--config", config_path, "config file path");
        sub->add_option("--preset", preset, "preset name (example1|example2|example3)");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--delta", delta_list, "comma list of noise levels");
        sub->add_option("--seed", seed_str, "master seed (unsigned 64-bit)");
        sub->add_option("--cutoff", cutoff_str, "relative eigenvalue cutoff");
        if (with_input)
            sub->add_option("input", ffmat_path, "far-field matrix file (FFMAT)")
                ->required();
    };

    auto* cmd_forward = app.add_subcommand("forward", "synthesize far-field matrices");
    add_common(cmd_forward, false);
    auto* cmd_invert = app.add_subcommand("invert", "reconstruct from a far-field matrix file");
    add_common(cmd_invert, true);
    auto* cmd_pipeline = app.add_subcommand("pipeline", "forward then invert every noise level");
    add_common(cmd_pipeline, false);
    auto* cmd_validate = app.add_subcommand("validate", "run the numerical validation suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_validate->parsed()) {
            const farscope::ValidationReport rep = farscope::run_validate();
            std::cout << rep.to_text();
            std::cout << (rep.all_pass() ? "all suites passed\n" : "SUITE FAILURES\n");
            return rep.all_pass() ? 0 : 1;
        }

        const farscope::RunConfig cfg = load_run_config(config_path, preset, out_dir,
                                                        delta_list, seed_str, cutoff_str);
        if (cmd_forward->parsed()) {
            const auto res = farscope::run_forward(cfg);
            print_warnings(res.warnings);
            for (const auto& f : res.ffmat_files) std::cout << "wrote " << f << "\n";
            std::cout << "wrote " << res.manifest_file << "\n";
            std::printf("cells=%d rcond=%.3g reciprocity_defect=%.3g\n", res.cells,
                        res.rcond, res.reciprocity);
        } else if (cmd_invert->parsed()) {
            const auto res = farscope::run_invert(ffmat_path, cfg);
            std::cout << "wrote " << res.csv_file << "\n";
            std::cout << "wrote " << res.pgm_file << "\n";
            std::cout << "wrote " << res.manifest_file << "\n";
            std::printf("inside_median=%.6g outside_median=%.6g ratio=%.6g\n",
                        res.inside_median, res.outside_median, res.ratio);
        } else if (cmd_pipeline->parsed()) {
            const auto res = farscope::run_pipeline(cfg);
            print_warnings(res.forward.warnings);
            for (const auto& f : res.forward.ffmat_files) std::cout << "wrote " << f << "\n";
            for (size_t i = 0; i < res.inversions.size(); ++i) {
                std::cout << "wrote " << res.inversions[i].csv_file << "\n";
                std::cout << "wrote " << res.inversions[i].pgm_file << "\n";
                std::printf("delta=%g inside/outside median ratio = %.6g\n",
                            res.forward.deltas[i], res.inversions[i].ratio);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

#pragma once

#include "cpf/cli/config.hpp"

#include <iosfwd>

namespace cpf::cli {

/**
 * Pipeline steps. Each reads the bundled or configured price files, writes
 * its artifacts under cfg.output_dir (one subdirectory per commodity) and
 * prints a short summary to out. All throw on invalid input; written files
 * are complete or absent.
 *
 *   ingest      ingest.csv, <name>/series.svg
 *   gridsearch  <name>/grid.csv, grid_best.json, gridsearch_timing.csv
 *   train       <name>/neural.model, loss.csv, neural_predictions.csv,
 *               neural_train_fit.csv, train_summary.json, *.svg
 *   arima       <name>/unitroot.json, unitroot_profile.csv, correlogram.csv,
 *               arma_orders.csv, arima_model.json, arima_predictions.csv, *.svg
 *   compare     <name>/accuracy.csv, hln.csv, combinations.csv, comparison.csv,
 *               comparison.svg; report.md and reference_comparison.csv at the top
 */
void cmd_ingest(const PipelineConfig& cfg, std::ostream& out);
void cmd_gridsearch(const PipelineConfig& cfg, std::ostream& out);
void cmd_train(const PipelineConfig& cfg, std::ostream& out);
void cmd_arima(const PipelineConfig& cfg, std::ostream& out);
void cmd_compare(const PipelineConfig& cfg, std::ostream& out);

/// Parses arguments and runs one subcommand; returns the process exit code.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cpf::cli

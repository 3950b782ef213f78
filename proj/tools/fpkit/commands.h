#ifndef FPKIT_TOOLS_FPKIT_COMMANDS_H_
#define FPKIT_TOOLS_FPKIT_COMMANDS_H_

#include <string>

#include <CLI11.hpp>

#include "fpkit/model/dataset.h"
#include "fpkit/model/io.h"

namespace fpkit::cli {

// Writes pretty JSON to |path|, or stdout when it is empty or "-".
void EmitJson(const Json& json, const std::string& path);
// Writes |text| the same way.
void EmitText(const std::string& text, const std::string& path);

Dataset LoadDataset(const std::string& schema_path, const std::string& path);

void AddPreprocess(CLI::App& app);
void AddMetrics(CLI::App& app);
void AddVerify(CLI::App& app);
void AddSynth(CLI::App& app);
void AddCalibrate(CLI::App& app);
void AddAttack(CLI::App& app);
void AddServe(CLI::App& app);

}  // namespace fpkit::cli

#endif  // FPKIT_TOOLS_FPKIT_COMMANDS_H_

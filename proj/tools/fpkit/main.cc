#include <fstream>
#include <iostream>

#include "commands.h"
#include "fpkit/error.h"

namespace fpkit::cli {

void EmitText(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
}

void EmitJson(const Json& json, const std::string& path) {
  EmitText(json.dump(2) + "\n", path);
}

Dataset LoadDataset(const std::string& schema_path, const std::string& path) {
  return ReadJsonlFile(path, ReadSchemaFile(schema_path));
}

}  // namespace fpkit::cli

int main(int argc, char** argv) {
  CLI::App app{"Browser fingerprint analytics and authentication toolkit"};
  app.require_subcommand(1);
  fpkit::cli::AddPreprocess(app);
  fpkit::cli::AddMetrics(app);
  fpkit::cli::AddVerify(app);
  fpkit::cli::AddSynth(app);
  fpkit::cli::AddCalibrate(app);
  fpkit::cli::AddAttack(app);
  fpkit::cli::AddServe(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const fpkit::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

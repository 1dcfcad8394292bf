#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hetwalk/graph.hpp"
#include "hetwalk/schema.hpp"

namespace testutil {

inline hetwalk::GraphSchema schema_from(const std::string& text) {
  std::istringstream in(text);
  return hetwalk::parse_schema(in, "<schema>");
}

inline hetwalk::HetGraph graph_from(const hetwalk::GraphSchema& schema, const std::string& text) {
  std::istringstream in(text);
  return hetwalk::HetGraph::parse(schema, in, "<edges>");
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path();
    path_ = base / ("hetwalk_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string str(const std::string& name = "") const {
    return name.empty() ? path_.string() : (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil

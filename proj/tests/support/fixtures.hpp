#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <rfuzzy/parser.hpp>

namespace testsupport {

inline std::string describe_diags(const std::vector<rfuzzy::diagnostic>& diags) {
  std::string out;
  for (const rfuzzy::diagnostic& d : diags)
    out += " [" + std::to_string(d.line) + ":" + std::to_string(d.column) + " " + d.code + ": " +
           d.message + "]";
  return out;
}

// Parse only; throws with the diagnostics when the text does not parse.
inline rfuzzy::program parse_text(const std::string& text) {
  rfuzzy::parse_result r = rfuzzy::parse_program({text, "<test>"});
  if (!r.ok()) throw std::runtime_error("parse failed:" + describe_diags(r.diagnostics));
  return *r.prog;
}

// Parse plus cross-declaration validation.
inline rfuzzy::program compile_text(const std::string& text) {
  rfuzzy::program p = parse_text(text);
  std::vector<rfuzzy::diagnostic> issues = rfuzzy::validate(p);
  if (!issues.empty()) throw std::runtime_error("validate failed:" + describe_diags(issues));
  return p;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

inline std::string sample_path(const std::string& name) {
  return std::string(RFUZZY_SAMPLES_DIR) + "/" + name;
}

inline rfuzzy::program load_sample(const std::string& name) {
  return compile_text(read_file(sample_path(name)));
}

}  // namespace testsupport

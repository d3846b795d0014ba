#pragma once

#include "socv/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace socv {

/// Parse/validation failure; carries every collected message, one per line.
class ConfigError : public Error {
 public:
  ConfigError(std::string what, std::vector<std::string> messages)
      : Error(std::move(what)), messages(std::move(messages)) {}
  std::vector<std::string> messages;
};

/// Node of the plain nested key-value configuration format:
///   key = scalar
///   key = [v, v, ...]            (arrays nest)
///   key { entries... }
/// '#' starts a comment; entries are separated by newlines or ';'.
struct ConfigNode {
  enum class Kind { Section, Scalar, Array };

  Kind kind = Kind::Section;
  int line = 0;
  std::string scalar;
  std::vector<ConfigNode> items;                            // Array
  std::vector<std::pair<std::string, ConfigNode>> entries;  // Section

  bool has(const std::string& key) const;
  const ConfigNode* find(const std::string& key) const;

  // Typed readers; push a message and return the fallback on mismatch.
  double as_number(std::vector<std::string>& errors, double fallback = 0.0) const;
  long as_integer(std::vector<std::string>& errors, long fallback = 0) const;
  bool as_bool(std::vector<std::string>& errors, bool fallback = false) const;
  std::string as_string(std::vector<std::string>& errors) const;
  Vector as_vector(std::vector<std::string>& errors) const;
  /// Scalar s -> s * I(rows); flat array -> diagonal; nested array -> dense.
  Matrix as_matrix(int rows, int cols, std::vector<std::string>& errors) const;
  std::vector<Matrix> as_matrix_list(int count, int rows, int cols,
                                     std::vector<std::string>& errors) const;
};

/// Parses the documented key-value tree; throws ConfigError with line info.
ConfigNode parse_config(const std::string& text);
ConfigNode parse_config_file(const std::string& path);

}  // namespace socv

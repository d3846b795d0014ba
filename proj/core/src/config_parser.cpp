#include "socv/config_parser.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace socv {
namespace {

struct Token {
  enum class Type { Key, Value, LBrace, RBrace, LBracket, RBracket, Comma,
                    Equals, End };
  Type type = Type::End;
  std::string text;
  int line = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_space();
    Token tok;
    tok.line = line_;
    if (pos_ >= text_.size()) {
      tok.type = Token::Type::End;
      return tok;
    }
    const char c = text_[pos_];
    switch (c) {
      case '{': ++pos_; tok.type = Token::Type::LBrace; return tok;
      case '}': ++pos_; tok.type = Token::Type::RBrace; return tok;
      case '[': ++pos_; tok.type = Token::Type::LBracket; return tok;
      case ']': ++pos_; tok.type = Token::Type::RBracket; return tok;
      case ',': ++pos_; tok.type = Token::Type::Comma; return tok;
      case '=': ++pos_; tok.type = Token::Type::Equals; return tok;
      case '"': {
        ++pos_;
        std::string s;
        while (pos_ < text_.size() && text_[pos_] != '"') {
          if (text_[pos_] == '\n') ++line_;
          s += text_[pos_++];
        }
        if (pos_ < text_.size()) ++pos_;  // closing quote
        tok.type = Token::Type::Value;
        tok.text = s;
        return tok;
      }
      default: {
        std::string s;
        while (pos_ < text_.size() && !std::isspace(text_[pos_]) &&
               std::string("{}[]=,;#").find(text_[pos_]) == std::string::npos) {
          s += text_[pos_++];
        }
        tok.type = Token::Type::Value;
        tok.text = s;
        return tok;
      }
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(c) || c == ';') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) { advance(); }

  ConfigNode parse_top() {
    ConfigNode root;
    root.kind = ConfigNode::Kind::Section;
    parse_entries(root, /*top_level=*/true);
    return root;
  }

 private:
  void advance() { current_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& what, int line) {
    throw ConfigError("config parse error",
                      {"line " + std::to_string(line) + ": " + what});
  }

  void parse_entries(ConfigNode& section, bool top_level) {
    while (true) {
      if (current_.type == Token::Type::End) {
        if (!top_level) fail("unexpected end of file inside '{...}'", current_.line);
        return;
      }
      if (current_.type == Token::Type::RBrace) {
        if (top_level) fail("unmatched '}'", current_.line);
        advance();
        return;
      }
      if (current_.type != Token::Type::Value) {
        fail("expected a key", current_.line);
      }
      const std::string key = current_.text;
      const int key_line = current_.line;
      advance();
      if (current_.type == Token::Type::Equals) {
        advance();
        ConfigNode value = parse_value();
        value.line = key_line;
        section.entries.emplace_back(key, std::move(value));
      } else if (current_.type == Token::Type::LBrace) {
        advance();
        ConfigNode child;
        child.kind = ConfigNode::Kind::Section;
        child.line = key_line;
        parse_entries(child, /*top_level=*/false);
        section.entries.emplace_back(key, std::move(child));
      } else {
        fail("expected '=' or '{' after key '" + key + "'", key_line);
      }
    }
  }

  ConfigNode parse_value() {
    ConfigNode node;
    node.line = current_.line;
    if (current_.type == Token::Type::LBracket) {
      node.kind = ConfigNode::Kind::Array;
      advance();
      while (current_.type != Token::Type::RBracket) {
        if (current_.type == Token::Type::End) {
          fail("unterminated '['", node.line);
        }
        node.items.push_back(parse_value());
        if (current_.type == Token::Type::Comma) advance();
      }
      advance();  // ']'
      return node;
    }
    if (current_.type == Token::Type::Value) {
      node.kind = ConfigNode::Kind::Scalar;
      node.scalar = current_.text;
      advance();
      return node;
    }
    fail("expected a value", current_.line);
  }

  Lexer lexer_;
  Token current_;
};

bool parse_number(const std::string& s, double& out) {
  if (s == "inf" || s == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (s == "-inf") {
    out = -std::numeric_limits<double>::infinity();
    return true;
  }
  try {
    size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

bool ConfigNode::has(const std::string& key) const {
  return find(key) != nullptr;
}

const ConfigNode* ConfigNode::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

double ConfigNode::as_number(std::vector<std::string>& errors,
                             double fallback) const {
  double out = fallback;
  if (kind != Kind::Scalar || !parse_number(scalar, out)) {
    errors.push_back("line " + std::to_string(line) + ": expected a number");
    return fallback;
  }
  return out;
}

long ConfigNode::as_integer(std::vector<std::string>& errors,
                            long fallback) const {
  const double v = as_number(errors, static_cast<double>(fallback));
  if (v != std::floor(v)) {
    errors.push_back("line " + std::to_string(line) + ": expected an integer");
    return fallback;
  }
  return static_cast<long>(v);
}

bool ConfigNode::as_bool(std::vector<std::string>& errors, bool fallback) const {
  if (kind == Kind::Scalar) {
    if (scalar == "true" || scalar == "1") return true;
    if (scalar == "false" || scalar == "0") return false;
  }
  errors.push_back("line " + std::to_string(line) + ": expected true/false");
  return fallback;
}

std::string ConfigNode::as_string(std::vector<std::string>& errors) const {
  if (kind != Kind::Scalar) {
    errors.push_back("line " + std::to_string(line) + ": expected a string");
    return {};
  }
  return scalar;
}

Vector ConfigNode::as_vector(std::vector<std::string>& errors) const {
  if (kind == Kind::Scalar) {
    Vector out(1);
    out[0] = as_number(errors);
    return out;
  }
  if (kind != Kind::Array) {
    errors.push_back("line " + std::to_string(line) + ": expected an array");
    return Vector();
  }
  Vector out(static_cast<int>(items.size()));
  for (size_t i = 0; i < items.size(); ++i) {
    out[static_cast<int>(i)] = items[i].as_number(errors);
  }
  return out;
}

Matrix ConfigNode::as_matrix(int rows, int cols,
                             std::vector<std::string>& errors) const {
  if (kind == Kind::Scalar) {
    double v = as_number(errors);
    if (rows != cols) {
      errors.push_back("line " + std::to_string(line) +
                       ": scalar shorthand needs a square matrix");
      return Matrix::Zero(rows, cols);
    }
    return v * Matrix::Identity(rows, rows);
  }
  if (kind != Kind::Array || items.empty()) {
    errors.push_back("line " + std::to_string(line) + ": expected a matrix");
    return Matrix::Zero(rows, cols);
  }
  if (items.front().kind == Kind::Scalar) {
    // Flat array: diagonal shorthand.
    if (rows != cols || static_cast<int>(items.size()) != rows) {
      errors.push_back("line " + std::to_string(line) +
                       ": diagonal shorthand needs " + std::to_string(rows) +
                       " entries on a square matrix");
      return Matrix::Zero(rows, cols);
    }
    Matrix out = Matrix::Zero(rows, cols);
    for (int i = 0; i < rows; ++i) out(i, i) = items[i].as_number(errors);
    return out;
  }
  if (static_cast<int>(items.size()) != rows) {
    errors.push_back("line " + std::to_string(line) + ": expected " +
                     std::to_string(rows) + " rows");
    return Matrix::Zero(rows, cols);
  }
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const ConfigNode& row = items[i];
    if (row.kind != Kind::Array || static_cast<int>(row.items.size()) != cols) {
      errors.push_back("line " + std::to_string(row.line) + ": expected " +
                       std::to_string(cols) + " columns");
      return Matrix::Zero(rows, cols);
    }
    for (int j = 0; j < cols; ++j) out(i, j) = row.items[j].as_number(errors);
  }
  return out;
}

std::vector<Matrix> ConfigNode::as_matrix_list(
    int count, int rows, int cols, std::vector<std::string>& errors) const {
  std::vector<Matrix> out;
  if (kind != Kind::Array || static_cast<int>(items.size()) != count) {
    errors.push_back("line " + std::to_string(line) + ": expected a list of " +
                     std::to_string(count) + " matrices");
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out.push_back(items[i].as_matrix(rows, cols, errors));
  }
  return out;
}

ConfigNode parse_config(const std::string& text) {
  Parser parser(text);
  return parser.parse_top();
}

ConfigNode parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file",
                      {"cannot open config file: " + path});
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace socv

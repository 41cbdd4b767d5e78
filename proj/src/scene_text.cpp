// Text encoding of scene trees.
//
//     document := entry*
//     entry    := key '=' value | key '{' entry* '}'
//     value    := number | string | 'true' | 'false' | 'null' | bare-word
//               | '[' (value (',' value)* ','?)? ']' | '{' entry* '}'
//
// '#' starts a comment running to the end of the line. Entries may be
// separated by newlines, ';' or ','. Bare words read as strings.

#include "pathlift/errors.hpp"
#include "pathlift/expression.hpp"
#include "pathlift/scene.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace pathlift {

namespace {

class TextParser {
 public:
  explicit TextParser(std::string_view text) : text_(text) {}

  SceneTree document() {
    SceneTree root = SceneTree::object();
    entries(root, /*nested=*/false);
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("scene: " + what, pos_); }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }

  std::string word() {
    skip();
    const std::size_t start = pos_;
    if (pos_ >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      fail("expected a key");
    }
    while (pos_ < text_.size() && word_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void entries(SceneTree& into, bool nested) {
    for (;;) {
      skip();
      while (pos_ < text_.size() && (text_[pos_] == ';' || text_[pos_] == ',')) {
        ++pos_;
        skip();
      }
      if (pos_ >= text_.size()) {
        if (nested) fail("unterminated section");
        return;
      }
      if (text_[pos_] == '}') {
        if (!nested) fail("unexpected '}'");
        ++pos_;
        return;
      }
      const std::size_t key_pos = pos_;
      const std::string key = word();
      if (into.contains(key)) {
        pos_ = key_pos;
        fail("duplicate key '" + key + "'");
      }
      if (peek('{')) {
        ++pos_;
        SceneTree section = SceneTree::object();
        entries(section, true);
        into[key] = std::move(section);
      } else if (peek('=')) {
        ++pos_;
        into[key] = value();
      } else {
        fail("expected '=' or '{' after '" + key + "'");
      }
    }
  }

  SceneTree value() {
    skip();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (c == '[') {
      ++pos_;
      SceneTree arr = SceneTree::array();
      if (peek(']')) {
        ++pos_;
        return arr;
      }
      for (;;) {
        arr.push_back(value());
        if (peek(',')) {
          ++pos_;
          if (peek(']')) {
            ++pos_;
            return arr;
          }
          continue;
        }
        if (peek(']')) {
          ++pos_;
          return arr;
        }
        fail("expected ',' or ']' in array");
      }
    }
    if (c == '{') {
      ++pos_;
      SceneTree section = SceneTree::object();
      entries(section, true);
      return section;
    }
    if (c == '"') return string();
    if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) return number();
    const std::string w = word();
    if (w == "true") return true;
    if (w == "false") return false;
    if (w == "null") return nullptr;
    return w;
  }

  SceneTree string() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        ++pos_;
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += text_[pos_];
      }
      ++pos_;
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  SceneTree number() {
    const std::size_t start = pos_;
    if (text_[pos_] == '+' || text_[pos_] == '-') ++pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                   ((text_[pos_] == '+' || text_[pos_] == '-') &&
                                    (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    std::string_view tok = text_.substr(start, pos_ - start);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const bool integral = tok.find_first_of(".eE") == std::string_view::npos;
    if (integral) {
      long long i = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), i);
      if (ec == std::errc() && ptr == tok.data() + tok.size()) return i;
    }
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(d)) {
      pos_ = start;
      fail("malformed number '" + std::string(tok) + "'");
    }
    return d;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_value(const SceneTree& v, int indent, std::string& out);

void print_string(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
}

void print_entries(const SceneTree& obj, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& [key, v] : obj.items()) {
    out += pad + key;
    if (v.is_object()) {
      out += " {\n";
      print_entries(v, indent + 1, out);
      out += pad + "}\n";
    } else {
      out += " = ";
      print_value(v, indent, out);
      out += '\n';
    }
  }
}

void print_value(const SceneTree& v, int indent, std::string& out) {
  switch (v.type()) {
    case SceneTree::value_t::null:
      out += "null";
      return;
    case SceneTree::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case SceneTree::value_t::number_integer:
    case SceneTree::value_t::number_unsigned:
      out += v.dump();
      return;
    case SceneTree::value_t::number_float:
      out += format_shortest(v.get<double>());
      return;
    case SceneTree::value_t::string:
      print_string(v.get<std::string>(), out);
      return;
    case SceneTree::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ", ";
        first = false;
        print_value(e, indent, out);
      }
      out += ']';
      return;
    }
    case SceneTree::value_t::object:
      out += "{\n";
      print_entries(v, indent + 1, out);
      out += std::string(static_cast<std::size_t>(indent) * 2, ' ') + "}";
      return;
    default:
      throw ValidationError("scene: unsupported value type");
  }
}

}  // namespace

SceneTree parse_scene_text(std::string_view text) { return TextParser(text).document(); }

std::string format_scene_text(const SceneTree& tree) {
  if (!tree.is_object()) throw ValidationError("scene: document must be a section");
  std::string out;
  print_entries(tree, 0, out);
  return out;
}

}  // namespace pathlift

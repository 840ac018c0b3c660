/*
 * Copyright 2026 The symsurrogate Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "symsurrogate/program.hpp"

namespace symsurrogate::expr {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : std::runtime_error(message + " at byte " + std::to_string(offset)),
      kind_(kind),
      offset_(offset) {}

namespace {

constexpr std::string_view kOpNames[] = {"plus", "minus", "times", "divide"};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program parse_all(std::size_t* dropped_closers) {
    std::vector<Node> nodes;
    parse_expr(nodes, /*depth=*/0);
    skip_space();
    std::size_t dropped = 0;
    if (dropped_closers != nullptr) {
      while (pos_ < text_.size() && text_[pos_] == ')') {
        ++pos_;
        ++dropped;
        skip_space();
      }
      *dropped_closers = dropped;
    }
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') {
        fail(ParseError::Kind::kUnbalanced, "unmatched ')'");
      }
      fail(ParseError::Kind::kMalformedToken, "trailing input after expression");
    }
    return Program(std::move(nodes));
  }

 private:
  [[noreturn]] void fail(ParseError::Kind kind, const std::string& what) const {
    throw ParseError(kind, pos_, what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void parse_expr(std::vector<Node>& nodes, std::size_t depth) {
    // Appendix-sized programs nest a few dozen levels; this only guards the
    // call stack against hostile input.
    if (depth > 10000) fail(ParseError::Kind::kMalformedToken, "nesting too deep");
    skip_space();
    if (pos_ >= text_.size()) {
      fail(ParseError::Kind::kUnbalanced, "unexpected end of input");
    }
    const char c = text_[pos_];
    if (c == '[') {
      parse_constant(nodes);
      return;
    }
    if (c == ')') fail(ParseError::Kind::kArity, "missing operand");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word.empty()) fail(ParseError::Kind::kMalformedToken, "unexpected character");

    for (std::size_t k = 0; k < 4; ++k) {
      if (word == kOpNames[k]) {
        parse_call(nodes, static_cast<Op>(k), word, depth);
        return;
      }
    }
    if (word.size() > 1 && word[0] == 'd') {
      std::uint32_t index = 0;
      const auto [ptr, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), index);
      if (ec == std::errc() && ptr == word.data() + word.size()) {
        nodes.push_back(Node{Op::kDim, index, 0.0});
        return;
      }
    }
    pos_ = start;
    fail(ParseError::Kind::kMalformedToken, "unknown token '" + std::string(word) + "'");
  }

  void parse_call(std::vector<Node>& nodes, Op op, std::string_view name,
                  std::size_t depth) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '(') {
      fail(ParseError::Kind::kMalformedToken,
           "expected '(' after '" + std::string(name) + "'");
    }
    ++pos_;
    nodes.push_back(Node{op, 0, 0.0});
    parse_expr(nodes, depth + 1);
    skip_space();
    if (pos_ >= text_.size()) fail(ParseError::Kind::kUnbalanced, "unexpected end of input");
    if (text_[pos_] != ',') {
      fail(ParseError::Kind::kArity, "'" + std::string(name) + "' expects 2 arguments");
    }
    ++pos_;
    parse_expr(nodes, depth + 1);
    skip_space();
    if (pos_ >= text_.size()) fail(ParseError::Kind::kUnbalanced, "missing ')'");
    if (text_[pos_] == ',') {
      fail(ParseError::Kind::kArity, "'" + std::string(name) + "' expects 2 arguments");
    }
    if (text_[pos_] != ')') fail(ParseError::Kind::kMalformedToken, "expected ')'");
    ++pos_;
  }

  void parse_constant(std::vector<Node>& nodes) {
    const std::size_t open = pos_;
    ++pos_;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::string_view literal = text_.substr(start, pos_ - start);
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ']') {
      pos_ = open;
      fail(ParseError::Kind::kUnbalanced, "unterminated constant");
    }
    if (!literal.empty() && literal.front() == '+') literal.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(literal.data(), literal.data() + literal.size(), value);
    if (literal.empty() || ec != std::errc() || ptr != literal.data() + literal.size() ||
        !std::isfinite(value)) {
      pos_ = start;
      fail(ParseError::Kind::kBadConstant, "constant is not a real literal");
    }
    ++pos_;
    nodes.push_back(Node{Op::kConst, 0, value});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append(const Program& program, std::size_t& i, std::string& out) {
  const Node& n = program.nodes()[i++];
  switch (n.op) {
    case Op::kConst:
      out += '[';
      out += format_constant(n.value);
      out += ']';
      return;
    case Op::kDim:
      out += 'd';
      out += std::to_string(n.dim);
      return;
    default:
      out += kOpNames[op_slot(n.op)];
      out += '(';
      append(program, i, out);
      out += ", ";
      append(program, i, out);
      out += ')';
  }
}

}  // namespace

Program parse(std::string_view text) { return Parser(text).parse_all(nullptr); }

RecoveredProgram parse_recovering(std::string_view text) {
  RecoveredProgram result;
  result.program = Parser(text).parse_all(&result.dropped_closers);
  return result;
}

std::string serialize(const Program& program) {
  std::string out;
  std::size_t i = 0;
  append(program, i, out);
  return out;
}

std::string format_constant(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, ptr);
  if (s.find_first_of(".eE") == std::string::npos &&
      s.find_first_of("ni") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string strip_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

}  // namespace symsurrogate::expr

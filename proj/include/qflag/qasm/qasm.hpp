// Copyright 2026 The qflag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal OpenQASM-2-style reader and writer. The grammar is documented in
// docs/qasm.md.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qflag/circuit/circuit.hpp"

namespace qflag {

/// Parse failure with a 1-based source position.
class SourceError : public std::runtime_error {
 public:
  SourceError(int line, int column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

namespace detail::qasm {

enum class Tok { Ident, Number, Symbol, String, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.compare(i, 2, "/*") == 0) {
      const int l0 = line, c0 = col;
      const std::size_t end = src.find("*/", i + 2);
      if (end == std::string::npos) throw SourceError(l0, c0, "unterminated comment");
      advance(end + 2 - i);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t j = i;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(ch)) || (ch == '.' && i + 1 < src.size() &&
                                                                std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = Tok::Number;
    } else if (ch == '"') {
      const std::size_t end = src.find('"', i + 1);
      if (end == std::string::npos) throw SourceError(line, col, "unterminated string");
      j = end + 1;
      t.kind = Tok::String;
    } else if (src.compare(i, 2, "->") == 0 || src.compare(i, 2, "==") == 0) {
      j = i + 2;
      t.kind = Tok::Symbol;
    } else if (std::string_view(";,[](){}+-*/").find(ch) != std::string_view::npos) {
      j = i + 1;
      t.kind = Tok::Symbol;
    } else {
      throw SourceError(line, col, std::string("unexpected character '") + ch + "'");
    }
    t.text = src.substr(i, j - i);
    advance(j - i);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(tokenize(src)) {}

  Circuit run() {
    parse_header();
    parse_declarations();
    Circuit c(qreg_size_, creg_size_);
    while (peek().kind != Tok::End) statement(c);
    return c;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is(const char* text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind != Tok::End && t.kind != Tok::String && t.text == text;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw SourceError(t.line, t.column, msg);
  }
  static std::string describe(const Token& t) {
    return t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  }
  const Token& expect(const char* text) {
    if (!is(text)) fail(peek(), std::string("expected '") + text + "', found " + describe(peek()));
    return next();
  }
  const Token& expect_ident() {
    if (peek().kind != Tok::Ident) fail(peek(), "expected an identifier, found " + describe(peek()));
    return next();
  }
  int expect_int() {
    const Token& t = peek();
    if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
      fail(t, "expected a non-negative integer, found " + describe(t));
    }
    next();
    try {
      return std::stoi(t.text);
    } catch (const std::exception&) {
      fail(t, "integer out of range");
    }
  }

  void parse_header() {
    if (is("OPENQASM")) {
      next();
      const Token& v = peek();
      if (v.kind != Tok::Number) fail(v, "expected a version number");
      next();
      expect(";");
    }
    while (is("include")) {
      next();
      if (peek().kind != Tok::String) fail(peek(), "expected a quoted file name");
      next();
      expect(";");
    }
  }

  void parse_declarations() {
    while (is("qreg") || is("creg")) {
      const Token& kw = next();
      const bool quantum = kw.text == "qreg";
      if ((quantum && !qreg_.empty()) || (!quantum && !creg_.empty())) {
        fail(kw, "only one " + kw.text + " declaration is supported");
      }
      const std::string name = expect_ident().text;
      expect("[");
      const int size = expect_int();
      expect("]");
      expect(";");
      if (quantum) {
        qreg_ = name;
        qreg_size_ = size;
      } else {
        creg_ = name;
        creg_size_ = size;
      }
      if (!qreg_.empty() && qreg_ == creg_) fail(kw, "register name '" + name + "' declared twice");
    }
    if (qreg_.empty()) fail(peek(), "missing qreg declaration");
  }

  // Index reference reg[k] into the named register.
  int indexed(const std::string& reg, int size, const char* what) {
    const Token& name = expect_ident();
    if (name.text != reg) fail(name, std::string("undeclared ") + what + " register '" + name.text + "'");
    expect("[");
    const Token& idx_tok = peek();
    const int idx = expect_int();
    if (idx >= size) fail(idx_tok, "index " + std::to_string(idx) + " out of range for '" + reg + "'");
    expect("]");
    return idx;
  }

  // Quantum argument: q[k], or bare q (whole register) when allowed.
  std::vector<int> qarg(bool allow_whole) {
    const Token& name = peek();
    if (name.kind == Tok::Ident && name.text == qreg_ && !is("[", 1)) {
      if (!allow_whole) fail(name, "expected an indexed qubit such as " + qreg_ + "[0]");
      next();
      std::vector<int> all(static_cast<std::size_t>(qreg_size_));
      for (int k = 0; k < qreg_size_; ++k) all[static_cast<std::size_t>(k)] = k;
      return all;
    }
    return {indexed(qreg_, qreg_size_, "quantum")};
  }

  double expr() {
    double v = term();
    while (is("+") || is("-")) {
      const bool plus = next().text == "+";
      const double r = term();
      v = plus ? v + r : v - r;
    }
    return v;
  }
  double term() {
    double v = unary();
    while (is("*") || is("/")) {
      const Token& op = next();
      const double r = unary();
      if (op.text == "/" && r == 0) fail(op, "division by zero");
      v = op.text == "*" ? v * r : v / r;
    }
    return v;
  }
  double unary() {
    if (is("-")) {
      next();
      return -unary();
    }
    if (is("+")) {
      next();
      return unary();
    }
    return primary();
  }
  double primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      try {
        return std::stod(t.text);
      } catch (const std::exception&) {
        fail(t, "malformed number '" + t.text + "'");
      }
    }
    if (t.kind == Tok::Ident && t.text == "pi") {
      next();
      return kPi;
    }
    if (is("(")) {
      next();
      const double v = expr();
      expect(")");
      return v;
    }
    fail(t, "expected a parameter expression, found " + describe(t));
  }

  // Appends with circuit validation errors reported at `where`.
  void append(Circuit& c, Instruction in, const Token& where) {
    try {
      c.append(std::move(in));
    } catch (const std::exception& e) {
      fail(where, e.what());
    }
  }

  void gate_statement(Circuit& c, int condition) {
    const Token& name = expect_ident();
    const GateInfo* info = find_gate(name.text);
    if (!info) fail(name, "unknown gate '" + name.text + "'");
    std::vector<double> params;
    if (is("(")) {
      const Token& open = next();
      if (!is(")")) {
        params.push_back(expr());
        while (is(",")) {
          next();
          params.push_back(expr());
        }
      }
      expect(")");
      if (static_cast<int>(params.size()) != info->num_params) {
        fail(open, "gate '" + name.text + "' takes " + std::to_string(info->num_params) +
                       " parameter(s), got " + std::to_string(params.size()));
      }
    } else if (info->num_params != 0) {
      fail(peek(), "gate '" + name.text + "' requires a parameter list");
    }
    std::vector<int> qubits = qarg(false);
    while (is(",")) {
      next();
      qubits.push_back(qarg(false).front());
    }
    if (!is(";")) fail(peek(), "expected ',' or ';', found " + describe(peek()));
    next();
    if (static_cast<int>(qubits.size()) != info->arity) {
      fail(name, "gate '" + name.text + "' acts on " + std::to_string(info->arity) + " qubit(s), got " +
                     std::to_string(qubits.size()));
    }
    Instruction in = Instruction::gate(name.text, std::move(qubits), std::move(params));
    in.condition = condition;
    append(c, std::move(in), name);
  }

  void statement(Circuit& c) {
    const Token& head = peek();
    if (head.kind != Tok::Ident && !is("if")) fail(head, "expected a statement, found " + describe(head));
    if (head.text == "qreg" || head.text == "creg") {
      fail(head, "register declarations must precede all statements");
    }
    if (head.text == "barrier") {
      next();
      std::vector<int> qubits = qarg(true);
      while (is(",")) {
        next();
        const auto more = qarg(true);
        qubits.insert(qubits.end(), more.begin(), more.end());
      }
      expect(";");
      append(c, Instruction::barrier(std::move(qubits)), head);
      return;
    }
    if (head.text == "measure" || head.text == "measure_x" || head.text == "measure_y") {
      next();
      const Basis basis = head.text == "measure" ? Basis::Z : head.text == "measure_x" ? Basis::X : Basis::Y;
      const int q = qarg(false).front();
      expect("->");
      if (creg_.empty()) fail(peek(), "measure requires a creg declaration");
      const int b = indexed(creg_, creg_size_, "classical");
      expect(";");
      append(c, Instruction::measure(q, b, basis), head);
      return;
    }
    if (head.text == "reset") {
      next();
      const int q = qarg(false).front();
      expect(";");
      append(c, Instruction::reset(q), head);
      return;
    }
    if (head.text == "if") {
      next();
      expect("(");
      if (creg_.empty()) fail(peek(), "condition requires a creg declaration");
      const int b = indexed(creg_, creg_size_, "classical");
      expect("==");
      const Token& v = peek();
      if (expect_int() != 1) fail(v, "only conditions of the form if(c[k]==1) are supported");
      expect(")");
      gate_statement(c, b);
      return;
    }
    gate_statement(c, -1);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string qreg_, creg_;
  int qreg_size_ = 0, creg_size_ = 0;
};

inline std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail::qasm

/// Parses the supported subset; throws SourceError on any problem.
inline Circuit parse_qasm(const std::string& text) { return detail::qasm::Parser(text).run(); }

/// Canonical text: fixed header, one instruction per line, parameters with
/// 12 significant digits.
inline std::string serialize_qasm(const Circuit& c) {
  using detail::qasm::format_param;
  std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out += "qreg q[" + std::to_string(c.num_qubits()) + "];\n";
  if (c.num_clbits() > 0) out += "creg c[" + std::to_string(c.num_clbits()) + "];\n";
  auto q = [](int k) { return "q[" + std::to_string(k) + "]"; };
  for (const Instruction& in : c.instructions()) {
    switch (in.kind) {
      case OpKind::Gate: {
        if (in.condition >= 0) out += "if(c[" + std::to_string(in.condition) + "]==1) ";
        out += in.name;
        if (!in.params.empty()) {
          out += "(";
          for (std::size_t i = 0; i < in.params.size(); ++i) {
            if (i) out += ",";
            out += format_param(in.params[i]);
          }
          out += ")";
        }
        out += " ";
        for (std::size_t i = 0; i < in.qubits.size(); ++i) {
          if (i) out += ",";
          out += q(in.qubits[i]);
        }
        break;
      }
      case OpKind::Barrier:
        out += "barrier ";
        for (std::size_t i = 0; i < in.qubits.size(); ++i) {
          if (i) out += ",";
          out += q(in.qubits[i]);
        }
        break;
      case OpKind::Measure:
        out += in.basis == Basis::Z ? "measure " : in.basis == Basis::X ? "measure_x " : "measure_y ";
        out += q(in.qubits[0]) + " -> c[" + std::to_string(in.clbit) + "]";
        break;
      case OpKind::Reset:
        out += "reset " + q(in.qubits[0]);
        break;
    }
    out += ";\n";
  }
  return out;
}

inline Circuit load_qasm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_qasm(ss.str());
}

inline void save_qasm(const Circuit& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize_qasm(c);
}

/// Structural equality with gate parameters compared to `tol`.
inline bool approx_equal(const Circuit& a, const Circuit& b, double tol) {
  if (a.num_qubits() != b.num_qubits() || a.num_clbits() != b.num_clbits() || a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    Instruction x = a[i], y = b[i];
    if (x.params.size() != y.params.size()) return false;
    for (std::size_t k = 0; k < x.params.size(); ++k) {
      if (std::abs(x.params[k] - y.params[k]) > tol) return false;
    }
    x.params.clear();
    y.params.clear();
    if (!(x == y)) return false;
  }
  return true;
}

}  // namespace qflag

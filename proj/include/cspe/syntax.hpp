#ifndef CSPE_SYNTAX_HPP
#define CSPE_SYNTAX_HPP

// Concrete syntax.
//
//   spec     := "alphabet" "{" name ("," name)* "}" "process" term
//   term     := choice
//   choice   := par ("[]" par)*
//   par      := atom ("|[" setexpr "]|" atom)*
//   atom     := "STOP" | "FAIL" | "?" ident ":" setexpr "->" atom | "(" term ")"
//   setexpr  := setterm (("u" | "n" | "\") setterm)*
//   setterm  := "{" [param ("," param)*] "}" | "Sigma" | "(" setexpr ")"
//
// Binary operators associate to the left.  A prefix body is an atom, so
// `?x:{a} -> STOP [] FAIL` is a choice between a prefix and FAIL.  Names
// inside braces are variables when a binder is in scope and events
// otherwise.  `--` starts a comment running to end of line.

#include <cctype>
#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cspe/error.hpp"
#include "cspe/term.hpp"

namespace cspe {

class ParseError : public Error {
 public:
  enum class Kind {
    kLexical,
    kSyntax,
    kUndeclaredEvent,
    kUnboundVariable,
    kDuplicateEvent,
    kNameClash,
  };

  ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + code(kind) +
              ": " + message),
        kind_(kind),
        line_(line),
        column_(column) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const char* code() const noexcept { return code(kind_); }

  static const char* code(Kind kind) noexcept {
    switch (kind) {
      case Kind::kLexical: return "lexical-error";
      case Kind::kSyntax: return "syntax-error";
      case Kind::kUndeclaredEvent: return "undeclared-event";
      case Kind::kUnboundVariable: return "unbound-variable";
      case Kind::kDuplicateEvent: return "duplicate-event";
      case Kind::kNameClash: return "name-clash";
    }
    return "error";
  }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

struct SpecFile {
  /// Events in declaration order.
  std::vector<Event> alphabet_decl;
  Term root;

  Alphabet alphabet() const { return Alphabet(alphabet_decl.begin(), alphabet_decl.end()); }
};

namespace detail {

enum class Tok {
  kIdent,
  kLBrace,
  kRBrace,
  kComma,
  kLParen,
  kRParen,
  kChoice,    // []
  kParOpen,   // |[
  kParClose,  // ]|
  kArrow,     // ->
  kQuestion,
  kColon,
  kBackslash,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
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
  auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (starts("--")) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line, cl = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::kIdent, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    struct Fixed {
      std::string_view text;
      Tok kind;
    };
    static constexpr Fixed fixed[] = {
        {"[]", Tok::kChoice}, {"|[", Tok::kParOpen}, {"]|", Tok::kParClose},
        {"->", Tok::kArrow},  {"{", Tok::kLBrace},   {"}", Tok::kRBrace},
        {",", Tok::kComma},   {"(", Tok::kLParen},   {")", Tok::kRParen},
        {"?", Tok::kQuestion}, {":", Tok::kColon},   {"\\", Tok::kBackslash},
    };
    bool matched = false;
    for (const auto& f : fixed) {
      if (starts(f.text)) {
        out.push_back({f.kind, std::string(f.text), l, cl});
        advance(f.text.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ParseError(ParseError::Kind::kLexical, l, cl,
                       std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::kEnd, "", line, col});
  return out;
}

inline bool is_keyword(const std::string& s) {
  return s == "alphabet" || s == "process" || s == "STOP" || s == "FAIL" || s == "Sigma";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {
    for (std::size_t k = 0; k + 1 < toks_.size(); ++k) {
      if (toks_[k].kind == Tok::kQuestion && toks_[k + 1].kind == Tok::kIdent) {
        binder_names_.insert(toks_[k + 1].text);
      }
    }
  }

  SpecFile spec() {
    SpecFile out;
    expect_word("alphabet");
    expect(Tok::kLBrace, "'{'");
    do {
      const Token& t = expect(Tok::kIdent, "event name");
      if (is_keyword(t.text)) {
        throw ParseError(ParseError::Kind::kNameClash, t.line, t.column,
                         "'" + t.text + "' is reserved");
      }
      if (!alphabet_.insert(Event{t.text}).second) {
        throw ParseError(ParseError::Kind::kDuplicateEvent, t.line, t.column,
                         "event '" + t.text + "' declared twice");
      }
      out.alphabet_decl.push_back(Event{t.text});
    } while (accept(Tok::kComma));
    expect(Tok::kRBrace, "'}'");
    expect_word("process");
    out.root = term();
    if (peek().kind != Tok::kEnd) syntax_error("end of input");
    return out;
  }

 private:
  Term term() {
    Term t = par();
    while (accept(Tok::kChoice)) t = Term::choice(std::move(t), par());
    return t;
  }

  Term par() {
    Term t = atom();
    while (accept(Tok::kParOpen)) {
      EventSetExpr sync = set_expr();
      expect(Tok::kParClose, "']|'");
      t = Term::parallel(std::move(t), std::move(sync), atom());
    }
    return t;
  }

  Term atom() {
    const Token& t = peek();
    if (t.kind == Tok::kIdent && t.text == "STOP") {
      ++pos_;
      return Term::stop();
    }
    if (t.kind == Tok::kIdent && t.text == "FAIL") {
      ++pos_;
      return Term::fail();
    }
    if (accept(Tok::kLParen)) {
      Term inner = term();
      expect(Tok::kRParen, "')'");
      return inner;
    }
    if (accept(Tok::kQuestion)) {
      const Token& var = expect(Tok::kIdent, "variable name");
      if (is_keyword(var.text) || alphabet_.contains(Event{var.text})) {
        throw ParseError(ParseError::Kind::kNameClash, var.line, var.column,
                         "binder '" + var.text + "' clashes with an event or keyword");
      }
      expect(Tok::kColon, "':'");
      EventSetExpr events = set_expr();
      expect(Tok::kArrow, "'->'");
      scope_.push_back(var.text);
      Term body = atom();
      scope_.pop_back();
      return Term::prefix(EventVar{var.text}, std::move(events), std::move(body));
    }
    syntax_error("a process");
  }

  EventSetExpr set_expr() {
    EventSetExpr e = set_term();
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::kIdent && t.text == "u") {
        ++pos_;
        e = EventSetExpr::set_union(std::move(e), set_term());
      } else if (t.kind == Tok::kIdent && t.text == "n") {
        ++pos_;
        e = EventSetExpr::set_intersection(std::move(e), set_term());
      } else if (accept(Tok::kBackslash)) {
        e = EventSetExpr::set_difference(std::move(e), set_term());
      } else {
        return e;
      }
    }
  }

  EventSetExpr set_term() {
    const Token& t = peek();
    if (t.kind == Tok::kIdent && t.text == "Sigma") {
      ++pos_;
      return EventSetExpr::full_alphabet();
    }
    if (accept(Tok::kLParen)) {
      EventSetExpr inner = set_expr();
      expect(Tok::kRParen, "')'");
      return inner;
    }
    if (accept(Tok::kLBrace)) {
      std::vector<EventParam> params;
      if (accept(Tok::kRBrace)) return EventSetExpr::literal({});
      do {
        params.push_back(param());
      } while (accept(Tok::kComma));
      expect(Tok::kRBrace, "'}'");
      return EventSetExpr::literal(std::move(params));
    }
    syntax_error("an event set");
  }

  EventParam param() {
    const Token& t = expect(Tok::kIdent, "event or variable");
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (*it == t.text) return EventVar{t.text};
    }
    if (alphabet_.contains(Event{t.text})) return Event{t.text};
    if (binder_names_.contains(t.text)) {
      throw ParseError(ParseError::Kind::kUnboundVariable, t.line, t.column,
                       "variable '" + t.text + "' is not bound here");
    }
    throw ParseError(ParseError::Kind::kUndeclaredEvent, t.line, t.column,
                     "event '" + t.text + "' is not in the alphabet");
  }

  const Token& peek() const { return toks_[pos_]; }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) syntax_error(what);
    return toks_[pos_++];
  }

  void expect_word(const char* word) {
    if (peek().kind != Tok::kIdent || peek().text != word) {
      syntax_error((std::string("'") + word + "'").c_str());
    }
    ++pos_;
  }

  [[noreturn]] void syntax_error(const std::string& wanted) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::kEnd ? "end of input" : "'" + t.text + "'";
    throw ParseError(ParseError::Kind::kSyntax, t.line, t.column,
                     "expected " + wanted + ", found " + got);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Alphabet alphabet_;
  std::vector<std::string> scope_;
  std::set<std::string> binder_names_;
};

}  // namespace detail

inline SpecFile parse_spec(std::string_view text) { return detail::Parser(text).spec(); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace detail {

inline void print_param(std::string& out, const EventParam& p) {
  out += std::visit([](const auto& v) { return v.name; }, p);
}

inline void print_set(std::string& out, const EventSetExpr& e, bool nested) {
  using Kind = EventSetExpr::Kind;
  switch (e.kind()) {
    case Kind::kLiteral: {
      out += '{';
      for (std::size_t i = 0; i < e.params().size(); ++i) {
        if (i > 0) out += ',';
        print_param(out, e.params()[i]);
      }
      out += '}';
      return;
    }
    case Kind::kFullAlphabet:
      out += "Sigma";
      return;
    default:
      break;
  }
  if (nested) out += '(';
  print_set(out, e.lhs(), false);
  out += e.kind() == Kind::kUnion ? " u " : e.kind() == Kind::kIntersection ? " n " : " \\ ";
  print_set(out, e.rhs(), true);
  if (nested) out += ')';
}

// Binding strength: choice 0, parallel 1, atoms 2.
inline int level(const Term& p) {
  switch (p.kind()) {
    case Term::Kind::kChoice: return 0;
    case Term::Kind::kParallel: return 1;
    default: return 2;
  }
}

inline void print_term(std::string& out, const Term& p, int min_level) {
  bool parens = level(p) < min_level;
  if (parens) out += '(';
  switch (p.kind()) {
    case Term::Kind::kStop:
      out += "STOP";
      break;
    case Term::Kind::kFail:
      out += "FAIL";
      break;
    case Term::Kind::kPrefix:
      out += '?';
      out += p.binder().name;
      out += ':';
      print_set(out, p.events(), false);
      out += " -> ";
      print_term(out, p.body(), 2);
      break;
    case Term::Kind::kChoice:
      print_term(out, p.left(), 0);
      out += " [] ";
      print_term(out, p.right(), 1);
      break;
    case Term::Kind::kParallel:
      print_term(out, p.left(), 1);
      out += " |[";
      print_set(out, p.events(), false);
      out += "]| ";
      print_term(out, p.right(), 2);
      break;
  }
  if (parens) out += ')';
}

}  // namespace detail

inline std::string print_set(const EventSetExpr& e) {
  std::string out;
  detail::print_set(out, e, false);
  return out;
}

/// Minimal-parenthesis rendering that parse_spec reads back unchanged.
inline std::string print_term(const Term& p) {
  std::string out;
  detail::print_term(out, p, 0);
  return out;
}

inline std::string print_spec(const SpecFile& spec) {
  std::string out = "alphabet {";
  for (std::size_t i = 0; i < spec.alphabet_decl.size(); ++i) {
    if (i > 0) out += ", ";
    out += spec.alphabet_decl[i].name;
  }
  out += "}\nprocess ";
  out += print_term(spec.root);
  out += '\n';
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Term& p) { return os << print_term(p); }

}  // namespace cspe

#endif  // CSPE_SYNTAX_HPP

#include "flatnf/parse.hpp"

#include <cctype>

#include "flatnf/errors.hpp"

namespace flatnf {

namespace {

struct Token {
  enum Type { Ident, Number, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Type type;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                s_[pos_] == '\r')) {
      bump();
    }
    tok_.line = line_;
    tok_.col = col_;
    tok_.text.clear();
    if (pos_ >= s_.size()) {
      tok_.type = Token::End;
      return;
    }
    char c = s_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '_')) {
        tok_.text += s_[pos_];
        bump();
      }
      tok_.type = Token::Ident;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        tok_.text += s_[pos_];
        bump();
      }
      tok_.type = Token::Number;
      return;
    }
    bump();
    switch (c) {
      case '+': tok_.type = Token::Plus; return;
      case '-': tok_.type = Token::Minus; return;
      case '*': tok_.type = Token::Star; return;
      case '/': tok_.type = Token::Slash; return;
      case '^': tok_.type = Token::Caret; return;
      case '(': tok_.type = Token::LParen; return;
      case ')': tok_.type = Token::RParen; return;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
    }
  }
  void bump() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, const SymbolTable& symbols)
      : lex_(text), symbols_(symbols) {}

  Expr parse() {
    Expr e = expr();
    const Token& t = lex_.peek();
    if (t.type != Token::End)
      throw SyntaxError("unexpected trailing input '" + t.text + "'", t.line, t.col);
    return e;
  }

 private:
  Expr expr() {
    bool neg = false;
    if (lex_.peek().type == Token::Minus) {
      lex_.take();
      neg = true;
    }
    Expr e = term();
    if (neg) e = -e;
    while (true) {
      Token::Type t = lex_.peek().type;
      if (t == Token::Plus) {
        lex_.take();
        e = e + term();
      } else if (t == Token::Minus) {
        lex_.take();
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    while (true) {
      Token::Type t = lex_.peek().type;
      if (t == Token::Star) {
        lex_.take();
        e = e * factor();
      } else if (t == Token::Slash) {
        lex_.take();
        e = e / factor();
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    if (lex_.peek().type == Token::Minus) {
      lex_.take();
      return -factor();
    }
    Expr b = base();
    if (lex_.peek().type == Token::Caret) {
      lex_.take();
      bool neg = false;
      if (lex_.peek().type == Token::Minus) {
        lex_.take();
        neg = true;
      }
      Token t = lex_.take();
      if (t.type != Token::Number)
        throw SyntaxError("expected integer exponent", t.line, t.col);
      int k = std::stoi(t.text);
      return b.pow(neg ? -k : k);
    }
    return b;
  }

  Expr base() {
    Token t = lex_.take();
    switch (t.type) {
      case Token::Ident: {
        auto it = symbols_.find(t.text);
        if (it == symbols_.end()) throw UndeclaredIdentifier(t.text, t.line, t.col);
        return Expr::variable(it->second);
      }
      case Token::Number:
        return Expr::constant(Rat(t.text));
      case Token::LParen: {
        Expr e = expr();
        Token r = lex_.take();
        if (r.type != Token::RParen)
          throw SyntaxError("expected ')'", r.line, r.col);
        return e;
      }
      default:
        throw SyntaxError("expected identifier, number or '('", t.line, t.col);
    }
  }

  Lexer lex_;
  const SymbolTable& symbols_;
};

}  // namespace

Expr parse_expr(const std::string& text, const SymbolTable& symbols) {
  return Parser(text, symbols).parse();
}

}  // namespace flatnf

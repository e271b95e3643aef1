#include "obdm/frontend.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace obdm {

ParseError::ParseError(const std::string& origin, std::size_t line, std::size_t column, const std::string& message)
    : Error(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

const ConjunctiveQuery& SpecDocument::query(const std::string& name) const {
  for (const auto& [n, q] : queries)
    if (n == name) return q;
  throw Error("no query named '" + name + "'");
}

namespace {

enum class Tok { Ident, String, Number, LParen, RParen, LBracket, RBracket, Comma, Dot, Slash, Turnstile, Arrow,
                 NotEq, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::String: return "string \"" + t.text + "\"";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  Lexer(std::string_view text, std::string origin) : text_(text), origin_(std::move(origin)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      const std::size_t l = line_, c = col_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", l, c});
        return out;
      }
      const char ch = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::string s;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          s += advance();
        out.push_back({Tok::Ident, s, l, c});
      } else if (std::isdigit(static_cast<unsigned char>(ch))) {
        std::string s;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) s += advance();
        out.push_back({Tok::Number, s, l, c});
      } else if (ch == '"') {
        advance();
        std::string s;
        for (;;) {
          if (pos_ >= text_.size() || text_[pos_] == '\n') throw ParseError(origin_, l, c, "unterminated string");
          char x = advance();
          if (x == '"') break;
          if (x == '\\') {
            if (pos_ >= text_.size()) throw ParseError(origin_, l, c, "unterminated string");
            x = advance();
          }
          s += x;
        }
        out.push_back({Tok::String, s, l, c});
      } else {
        out.push_back(punct(l, c));
      }
    }
  }

 private:
  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token punct(std::size_t l, std::size_t c) {
    const char ch = advance();
    auto next_is = [&](char x) {
      if (pos_ < text_.size() && text_[pos_] == x) {
        advance();
        return true;
      }
      return false;
    };
    switch (ch) {
      case '(': return {Tok::LParen, "(", l, c};
      case ')': return {Tok::RParen, ")", l, c};
      case '[': return {Tok::LBracket, "[", l, c};
      case ']': return {Tok::RBracket, "]", l, c};
      case ',': return {Tok::Comma, ",", l, c};
      case '.': return {Tok::Dot, ".", l, c};
      case '/': return {Tok::Slash, "/", l, c};
      case ':':
        if (next_is('-')) return {Tok::Turnstile, ":-", l, c};
        break;
      case '-':
        if (next_is('>')) return {Tok::Arrow, "->", l, c};
        break;
      case '!':
        if (next_is('=')) return {Tok::NotEq, "!=", l, c};
        break;
      default:
        break;
    }
    throw ParseError(origin_, l, c, std::string("unexpected character '") + ch + "'");
  }

  std::string_view text_;
  std::string origin_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string origin) : toks_(std::move(toks)), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError(origin_, at.line, at.column, msg);
  }

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const std::string& w) const { return at(Tok::Ident) && peek().text == w; }

  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  const Token& expect(Tok k, const std::string& what) {
    if (!at(k)) fail(peek(), "expected " + what + ", found " + describe(peek()));
    return take();
  }

  void expect_word(const std::string& w) {
    if (!at_word(w)) fail(peek(), "expected '" + w + "', found " + describe(peek()));
    take();
  }

  std::string name(const std::string& what) { return expect(Tok::Ident, what).text; }

  // Variables are bare identifiers unless `bare_constants`, where only capitalised
  // identifiers are variables.
  Term term(bool bare_constants) {
    const Token& t = take();
    switch (t.kind) {
      case Tok::String:
      case Tok::Number:
        return Term::constant(t.text);
      case Tok::Ident:
        if (bare_constants && !std::isupper(static_cast<unsigned char>(t.text.front())) && t.text.front() != '_')
          return Term::constant(t.text);
        return Term::var(t.text);
      default:
        fail(t, "expected a term, found " + describe(t));
    }
  }

  struct Located {
    Atom atom;
    Token at;
  };

  Located atom(bool bare_constants) {
    const Token start = peek();
    Atom a{name("a predicate name"), {}};
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      a.args.push_back(term(bare_constants));
      while (at(Tok::Comma)) {
        take();
        a.args.push_back(term(bare_constants));
      }
    }
    expect(Tok::RParen, "')'");
    return {std::move(a), start};
  }

  std::vector<Located> atoms() {
    std::vector<Located> out;
    out.push_back(atom(false));
    while (at(Tok::Comma)) {
      take();
      out.push_back(atom(false));
    }
    return out;
  }

  // ---- spec document ----

  SpecDocument spec() {
    SpecDocument doc;
    int stage = 0;  // 1 source, 2 tbox, 3 mapping, 4 queries
    std::vector<TBoxAssertion> tbox;
    while (!at(Tok::End)) {
      const Token open = expect(Tok::LBracket, "a section header");
      const Token kw = expect(Tok::Ident, "a section name");
      int next = 0;
      std::string qname;
      if (kw.text == "source") {
        next = 1;
      } else if (kw.text == "tbox") {
        next = 2;
      } else if (kw.text == "mapping") {
        next = 3;
      } else if (kw.text == "query") {
        next = 4;
        qname = name("a query name");
      } else {
        fail(kw, "unknown section '" + kw.text + "'");
      }
      expect(Tok::RBracket, "']'");
      if (next < stage || (next == stage && next != 4))
        fail(open, "section '" + kw.text + "' out of order (expected source, tbox, mapping, queries)");
      if (next > 2 && stage <= 2 && !tbox_done_) finish_tbox(doc, tbox, open);
      stage = next;
      const auto section_end = [&] { return at(Tok::LBracket) || at(Tok::End); };
      switch (next) {
        case 1:
          while (!section_end()) source_decl(doc);
          break;
        case 2:
          while (!section_end()) tbox.push_back(assertion());
          break;
        case 3:
          while (!section_end()) mapping_rule(doc);
          break;
        case 4:
          query_section(doc, qname, open);
          break;
      }
    }
    if (!tbox_done_) finish_tbox(doc, tbox, peek());
    return doc;
  }

  void source_decl(SpecDocument& doc) {
    const Token n = expect(Tok::Ident, "a relation name");
    expect(Tok::Slash, "'/'");
    const Token a = expect(Tok::Number, "an arity");
    expect(Tok::Dot, "'.'");
    if (n.text == kTop || n.text == kBottom) fail(n, "'" + n.text + "' is a reserved predicate");
    if (!doc.spec.source.emplace(n.text, std::stoul(a.text)).second)
      fail(n, "source relation '" + n.text + "' declared twice");
  }

  Role role() {
    if (at_word("inv")) {
      take();
      expect(Tok::LParen, "'('");
      Role r{name("a role name"), true};
      expect(Tok::RParen, "')'");
      return r;
    }
    return {name("a role name"), false};
  }

  BasicConcept basic_concept() {
    if (at_word("exists")) {
      take();
      return BasicConcept::exists(role());
    }
    return BasicConcept::atomic(name("a concept name"));
  }

  TBoxAssertion assertion() {
    const Token start = peek();
    TBoxAssertion out;
    if (at_word("funct")) {
      take();
      out = Functionality{role()};
    } else if (at_word("id")) {
      take();
      Identification id{basic_concept(), {}};
      id.path.push_back(role());
      while (at(Tok::Comma)) {
        take();
        id.path.push_back(role());
      }
      out = std::move(id);
    } else {
      // Either side may be a role; the keyword decides.
      const std::size_t save = pos_;
      const Token lhs_tok = peek();
      BasicConcept lhs = basic_concept();
      if (at_word("isa")) {
        take();
        out = ConceptInclusion{lhs, basic_concept()};
      } else if (at_word("disjoint")) {
        take();
        out = ConceptDisjointness{lhs, basic_concept()};
      } else {
        pos_ = save;
        Role r1 = role();
        if (at_word("subrole")) {
          take();
          out = RoleInclusion{r1, role()};
        } else if (at_word("disjointrole")) {
          take();
          out = RoleDisjointness{r1, role()};
        } else {
          fail(peek(), "malformed assertion: expected isa, disjoint, subrole or disjointrole after " +
                           describe(lhs_tok));
        }
      }
    }
    expect(Tok::Dot, "'.'");
    assertion_at_.push_back(start);
    return out;
  }

  void finish_tbox(SpecDocument& doc, std::vector<TBoxAssertion>& tbox, const Token& at) {
    tbox_done_ = true;
    for (std::size_t i = 0; i < tbox.size(); ++i) {
      try {
        TBox(std::vector<TBoxAssertion>(tbox.begin(), tbox.begin() + static_cast<std::ptrdiff_t>(i) + 1));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        fail(assertion_at_[i], e.what());
      }
    }
    try {
      doc.spec.tbox = TBox(std::move(tbox));
    } catch (const Error& e) {
      fail(at, e.what());
    }
    for (const auto& c : doc.spec.tbox.concept_names()) declare_ontology(c, 1, at);
    for (const auto& r : doc.spec.tbox.role_names()) declare_ontology(r, 2, at);
    for (const auto& [s, _] : doc.spec.source)
      if (ontology_.count(s)) fail(at, "'" + s + "' is both a source relation and an ontology predicate");
  }

  void declare_ontology(const std::string& p, std::size_t arity, const Token& at) {
    auto [it, inserted] = ontology_.emplace(p, arity);
    if (!inserted && it->second != arity) fail(at, "arity mismatch for ontology predicate '" + p + "'");
  }

  void mapping_rule(SpecDocument& doc) {
    const Token start = peek();
    auto body = atoms();
    expect(Tok::Arrow, "'->'");
    auto head = atoms();
    expect(Tok::Dot, "'.'");
    StTgd tgd;
    for (auto& [a, tok] : body) {
      auto it = doc.spec.source.find(a.predicate);
      if (it == doc.spec.source.end()) fail(tok, "undeclared source relation '" + a.predicate + "'");
      if (it->second != a.arity())
        fail(tok, "arity mismatch: '" + a.predicate + "' declared with arity " + std::to_string(it->second));
      tgd.body.push_back(std::move(a));
    }
    for (auto& [a, tok] : head) {
      if (a.is_top() || a.is_bottom()) fail(tok, "builtin '" + a.predicate + "' is not allowed in mappings");
      if (doc.spec.source.count(a.predicate)) fail(tok, "source relation '" + a.predicate + "' in a mapping head");
      if (a.arity() != 1 && a.arity() != 2)
        fail(tok, "ontology predicate '" + a.predicate + "' must have arity 1 or 2");
      declare_ontology(a.predicate, a.arity(), tok);
      tgd.head.push_back(std::move(a));
    }
    try {
      tgd.validate();
    } catch (const Error& e) {
      fail(start, e.what());
    }
    doc.spec.mapping.push_back(std::move(tgd));
  }

  ConjunctiveQuery query(const std::string* expected,
                         const std::function<void(const Atom&, const Token&)>& check, std::string* name_out) {
    const Token hn = expect(Tok::Ident, "the query head");
    if (expected && hn.text != *expected)
      fail(hn, "query head '" + hn.text + "' does not match section name '" + *expected + "'");
    if (name_out) *name_out = hn.text;
    expect(Tok::LParen, "'('");
    Tuple head;
    if (!at(Tok::RParen)) {
      head.push_back(term(false));
      while (at(Tok::Comma)) {
        take();
        head.push_back(term(false));
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Turnstile, "':-'");
    ConjunctiveQuery q;
    if ((at_word(kTop) || at_word(kBottom)) && peek(1).kind == Tok::Dot) {
      q = take().text == kTop ? ConjunctiveQuery::top(head) : ConjunctiveQuery::bottom(head);
    } else {
      q.head = head;
      for (auto& [a, tok] : atoms()) {
        if (a.is_top() || a.is_bottom()) {
          if (a.arity() != 1) fail(tok, "builtin '" + a.predicate + "' is unary");
        } else {
          check(a, tok);
        }
        q.body.push_back(std::move(a));
      }
    }
    expect(Tok::Dot, "'.'");
    try {
      q.check_safe();
    } catch (const Error& e) {
      fail(hn, e.what());
    }
    return q;
  }

  void query_section(SpecDocument& doc, const std::string& qname, const Token& open) {
    for (const auto& [n, _] : doc.queries)
      if (n == qname) fail(open, "duplicate query name '" + qname + "'");
    auto q = query(&qname, [&](const Atom& a, const Token& tok) {
      if (auto it = doc.spec.source.find(a.predicate); it != doc.spec.source.end()) {
        if (it->second != a.arity()) fail(tok, "arity mismatch for source relation '" + a.predicate + "'");
      } else if (auto jt = ontology_.find(a.predicate); jt != ontology_.end()) {
        if (jt->second != a.arity()) fail(tok, "arity mismatch for ontology predicate '" + a.predicate + "'");
      } else {
        fail(tok, "undeclared predicate '" + a.predicate + "'");
      }
    }, nullptr);
    doc.queries.emplace_back(qname, std::move(q));
  }

  std::pair<std::string, ConjunctiveQuery> standalone_query() {
    std::string name;
    auto q = query(nullptr, [](const Atom&, const Token&) {}, &name);
    if (!at(Tok::End)) fail(peek(), "trailing input after the query");
    return {name, std::move(q)};
  }

  TBox standalone_tbox() {
    std::vector<TBoxAssertion> out;
    while (!at(Tok::End)) out.push_back(assertion());
    for (std::size_t i = 0; i < out.size(); ++i) {
      try {
        TBox(std::vector<TBoxAssertion>(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(i) + 1));
      } catch (const Error& e) {
        fail(assertion_at_[i], e.what());
      }
    }
    return TBox(std::move(out));
  }

  // ---- facts files ----

  Instance facts() {
    Instance out(SchemaTag::Source);
    std::map<std::string, std::size_t> arity;
    while (!at(Tok::End)) {
      auto [a, tok] = atom(true);
      expect(Tok::Dot, "'.'");
      for (const auto& t : a.args)
        if (t.is_var()) fail(tok, "variable '" + t.label + "' in a database file");
      auto [it, inserted] = arity.emplace(a.predicate, a.arity());
      if (!inserted && it->second != a.arity()) fail(tok, "arity mismatch for '" + a.predicate + "'");
      out.insert(std::move(a));
    }
    return out;
  }

 private:
  std::vector<Token> toks_;
  std::string origin_;
  std::size_t pos_ = 0;
  bool tbox_done_ = false;
  std::vector<Token> assertion_at_;
  std::map<std::string, std::size_t> ontology_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) out += (i ? ", " : "") + query_atom(atoms[i]);
  return out;
}

}  // namespace

SpecDocument parse_spec(std::string_view text, const std::string& origin) {
  Parser p(Lexer(text, origin).run(), origin);
  return p.spec();
}

SpecDocument load_spec(const std::string& path) { return parse_spec(read_file(path), path); }

std::string print_spec(const SpecDocument& doc) {
  std::string out = "[source]\n";
  for (const auto& [name, arity] : doc.spec.source) out += name + "/" + std::to_string(arity) + ".\n";
  out += "\n[tbox]\n";
  for (const auto& a : doc.spec.tbox.assertions()) out += to_string(a) + "\n";
  out += "\n[mapping]\n";
  for (const auto& tgd : doc.spec.mapping) out += join_atoms(tgd.body) + " -> " + join_atoms(tgd.head) + ".\n";
  for (const auto& [name, q] : doc.queries) out += "\n[query " + name + "]\n" + to_string(q, name) + "\n";
  return out;
}

ConjunctiveQuery parse_query(std::string_view text, const std::string& origin) {
  Parser p(Lexer(text, origin).run(), origin);
  return p.standalone_query().second;
}

TBox parse_tbox(std::string_view text, const std::string& origin) {
  Parser p(Lexer(text, origin).run(), origin);
  return p.standalone_tbox();
}

Instance parse_db(std::string_view text, const std::string& origin) {
  Parser p(Lexer(text, origin).run(), origin);
  return p.facts();
}

Instance load_db(const std::string& path) { return parse_db(read_file(path), path); }

}  // namespace obdm

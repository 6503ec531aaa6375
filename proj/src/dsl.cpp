#include "domcalc/dsl.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace domcalc::dsl {

namespace {

enum class Tok { ident, number, string, lbrace, rbrace, lparen, rparen, semi, colon, comma, dot, equals, arrow,
                 minus, slash, eof, invalid };

struct Token
{
  Tok kind = Tok::eof;
  std::string text;
  int line = 1, col = 1;
  int endLine = 1, endCol = 1;
};

const std::set<std::string>& top_keywords()
{
  static const std::set<std::string> kw = {"quantity", "rule",    "conversion", "part", "component",
                                           "material", "channel", "axiom",      "type", "value",
                                           "category"};
  return kw;
}

class Lexer
{
public:
  explicit Lexer(std::string_view text) : d_text(text) {}

  std::vector<Token> run()
  {
    std::vector<Token> out;
    for (;;)
    {
      skip_trivia();
      Token t;
      t.line = d_line;
      t.col = d_col;
      if (d_pos >= d_text.size())
      {
        t.kind = Tok::eof;
        t.endLine = d_line;
        t.endCol = d_col;
        out.push_back(t);
        return out;
      }
      char c = d_text[d_pos];
      unsigned char uc = static_cast<unsigned char>(c);
      if (std::isalpha(uc) || c == '_' || uc >= 0x80)
      {
        std::size_t start = d_pos;
        while (d_pos < d_text.size())
        {
          unsigned char u = static_cast<unsigned char>(d_text[d_pos]);
          if (!(std::isalnum(u) || d_text[d_pos] == '_' || u >= 0x80)) break;
          advance();
        }
        t.kind = Tok::ident;
        t.text = std::string(d_text.substr(start, d_pos - start));
      }
      else if (std::isdigit(uc))
      {
        std::size_t start = d_pos;
        while (d_pos < d_text.size() && (std::isdigit(static_cast<unsigned char>(d_text[d_pos])) || d_text[d_pos] == '.'))
          advance();
        if (d_pos < d_text.size() && (d_text[d_pos] == 'e' || d_text[d_pos] == 'E'))
        {
          std::size_t look = d_pos + 1;
          if (look < d_text.size() && (d_text[look] == '+' || d_text[look] == '-')) ++look;
          if (look < d_text.size() && std::isdigit(static_cast<unsigned char>(d_text[look])))
          {
            while (d_pos < look) advance();
            while (d_pos < d_text.size() && std::isdigit(static_cast<unsigned char>(d_text[d_pos]))) advance();
          }
        }
        t.kind = Tok::number;
        t.text = std::string(d_text.substr(start, d_pos - start));
      }
      else if (c == '"')
      {
        advance();
        t.kind = Tok::string;
        bool closed = false;
        while (d_pos < d_text.size())
        {
          char s = d_text[d_pos];
          if (s == '\n') break;
          advance();
          if (s == '"')
          {
            closed = true;
            break;
          }
          if (s == '\\' && d_pos < d_text.size())
          {
            t.text += d_text[d_pos];
            advance();
            continue;
          }
          t.text += s;
        }
        if (!closed) t.kind = Tok::invalid, t.text = "unterminated string";
      }
      else
      {
        advance();
        switch (c)
        {
          case '{': t.kind = Tok::lbrace; break;
          case '}': t.kind = Tok::rbrace; break;
          case '(': t.kind = Tok::lparen; break;
          case ')': t.kind = Tok::rparen; break;
          case ';': t.kind = Tok::semi; break;
          case ':': t.kind = Tok::colon; break;
          case ',': t.kind = Tok::comma; break;
          case '.': t.kind = Tok::dot; break;
          case '=': t.kind = Tok::equals; break;
          case '/': t.kind = Tok::slash; break;
          case '-':
            if (d_pos < d_text.size() && d_text[d_pos] == '>')
            {
              advance();
              t.kind = Tok::arrow;
            }
            else
              t.kind = Tok::minus;
            break;
          default: t.kind = Tok::invalid; t.text = std::string(1, c); break;
        }
        if (t.text.empty()) t.text = std::string(d_text.substr(d_pos - (t.kind == Tok::arrow ? 2 : 1), t.kind == Tok::arrow ? 2 : 1));
      }
      t.endLine = d_line;
      t.endCol = d_col;
      out.push_back(std::move(t));
    }
  }

private:
  void advance()
  {
    if (d_text[d_pos] == '\n')
    {
      ++d_line;
      d_col = 1;
    }
    else
      ++d_col;
    ++d_pos;
  }
  void skip_trivia()
  {
    while (d_pos < d_text.size())
    {
      char c = d_text[d_pos];
      if (std::isspace(static_cast<unsigned char>(c)))
        advance();
      else if (c == '-' && d_pos + 1 < d_text.size() && d_text[d_pos + 1] == '-')
        while (d_pos < d_text.size() && d_text[d_pos] != '\n') advance();
      else
        break;
    }
  }

  std::string_view d_text;
  std::size_t d_pos = 0;
  int d_line = 1, d_col = 1;
};

struct SyntaxError
{
  std::string message;
  Token at;
};

class Parser
{
public:
  Parser(std::vector<Token> toks, std::string file) : d_toks(std::move(toks)), d_file(std::move(file))
  {
    d_result.model.spans.set_file(d_file);
  }

  ParseResult run()
  {
    while (peek().kind != Tok::eof)
    {
      std::size_t start = d_pos;
      try
      {
        declaration();
      }
      catch (const SyntaxError& e)
      {
        error("E001", e.message, span_of(e.at));
        recover(start);
      }
    }
    return std::move(d_result);
  }

private:
  // -- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const
  {
    std::size_t i = std::min(d_pos + ahead, d_toks.size() - 1);
    return d_toks[i];
  }
  const Token& next()
  {
    const Token& t = d_toks[d_pos];
    if (d_pos + 1 < d_toks.size()) ++d_pos;
    return t;
  }
  bool at_word(const char* w) const { return peek().kind == Tok::ident && peek().text == w; }
  bool accept(Tok k)
  {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  bool accept_word(const char* w)
  {
    if (!at_word(w)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError{msg, peek()}; }
  static std::string describe(const Token& t)
  {
    switch (t.kind)
    {
      case Tok::eof: return "end of file";
      case Tok::string: return "string \"" + t.text + "\"";
      case Tok::invalid: return t.text == "unterminated string" ? t.text : "'" + t.text + "'";
      default: return "'" + t.text + "'";
    }
  }
  const Token& expect(Tok k, const char* what)
  {
    if (peek().kind != k) fail(std::string("expected ") + what + ", found " + describe(peek()));
    return next();
  }
  void expect_word(const char* w)
  {
    if (!accept_word(w)) fail(std::string("expected '") + w + "', found " + describe(peek()));
  }
  std::string ident(const char* what)
  {
    if (peek().kind != Tok::ident || top_keywords().count(peek().text))
      fail(std::string("expected ") + what + ", found " + describe(peek()));
    return next().text;
  }
  SourceSpan span_of(const Token& t) const { return SourceSpan{d_file, t.line, t.col, t.endLine, t.endCol}; }
  SourceSpan span_from(std::size_t start_tok) const
  {
    const Token& a = d_toks[start_tok];
    const Token& b = d_toks[d_pos > start_tok ? d_pos - 1 : start_tok];
    return SourceSpan{d_file, a.line, a.col, b.endLine, b.endCol};
  }
  void error(const std::string& code, const std::string& msg, SourceSpan span)
  {
    d_result.diagnostics.push_back(Diagnostic{Severity::error, code, msg, std::move(span)});
  }

  void recover(std::size_t start)
  {
    // skip to the next top-level keyword outside braces
    int depth = 0;
    for (std::size_t i = start; i < d_pos; ++i)
    {
      if (d_toks[i].kind == Tok::lbrace) ++depth;
      if (d_toks[i].kind == Tok::rbrace) --depth;
    }
    if (d_pos == start) next();
    while (peek().kind != Tok::eof)
    {
      const Token& t = peek();
      if (depth <= 0 && t.kind == Tok::ident && top_keywords().count(t.text)) return;
      if (t.kind == Tok::lbrace) ++depth;
      if (t.kind == Tok::rbrace) --depth;
      next();
    }
  }

  Scalar number()
  {
    bool neg = accept(Tok::minus);
    const Token& t = expect(Tok::number, "number");
    std::string text = t.text;
    if (accept(Tok::slash)) text += "/" + expect(Tok::number, "denominator").text;
    auto v = Scalar::parse(text);
    if (!v) throw SyntaxError{"malformed number '" + text + "'", t};
    return neg ? -*v : *v;
  }

  bool claim(std::set<std::string>& names, const std::string& name, const std::string& what, SourceSpan span)
  {
    if (names.insert(name).second) return true;
    error("E002", "duplicate " + what + " '" + name + "'", std::move(span));
    return false;
  }

  // -- declarations --------------------------------------------------------

  void declaration()
  {
    const Token& t = peek();
    if (t.kind != Tok::ident) fail("expected a declaration, found " + describe(t));
    const std::string& w = t.text;
    if (w == "quantity") return quantity();
    if (w == "rule") return rule();
    if (w == "conversion") return conversion();
    if (w == "part") return endurant(EndurantKind::part);
    if (w == "component") return endurant(EndurantKind::component);
    if (w == "material") return endurant(EndurantKind::material);
    if (w == "channel") return channel();
    if (w == "axiom") return axiom();
    if (w == "type") return type_stmt();
    if (w == "value") return observer_stmt();
    if (w == "category") return category_stmt();
    fail("expected a declaration, found " + describe(t));
  }

  void quantity()
  {
    std::size_t start = d_pos;
    next();
    QuantityDecl q;
    q.name = KindName(ident("quantity name"));
    expect(Tok::colon, "':'");
    q.role = ident("role (point, interval or plain)");
    if (q.role != "point" && q.role != "interval" && q.role != "plain")
      throw SyntaxError{"unknown role '" + q.role + "'", d_toks[d_pos - 1]};
    q.unit = expect(Tok::string, "quoted unit expression").text;
    for (;;)
    {
      if (accept_word("interval"))
        q.intervalKind = KindName(ident("interval kind"));
      else if (accept_word("mean"))
        q.meanKind = KindName(ident("mean kind"));
      else if (accept_word("ordered"))
        q.ordered = true;
      else
        break;
    }
    expect(Tok::semi, "';'");
    SourceSpan sp = span_from(start);
    if (!claim(d_kinds, q.name.str(), "quantity", sp)) return;
    d_result.model.spans.set("quantity:" + q.name.str(), sp);
    d_result.model.quantities.push_back(std::move(q));
  }

  void rule()
  {
    std::size_t start = d_pos;
    next();
    RuleDecl r;
    r.op = ident("operator name");
    expect(Tok::lparen, "'('");
    r.lhs = KindName(ident("kind"));
    expect(Tok::comma, "','");
    r.rhs = KindName(ident("kind"));
    expect(Tok::rparen, "')'");
    expect(Tok::equals, "'='");
    std::string res = ident("result kind or 'forbidden'");
    if (res != "forbidden") r.result = KindName(res);
    expect(Tok::semi, "';'");
    d_result.model.spans.set("rule:" + std::to_string(d_result.model.rules.size()), span_from(start));
    d_result.model.rules.push_back(std::move(r));
  }

  void conversion()
  {
    std::size_t start = d_pos;
    next();
    ConversionDecl c;
    c.name = ConversionName(ident("conversion name"));
    expect(Tok::colon, "':'");
    c.from = KindName(ident("source kind"));
    expect(Tok::arrow, "'->'");
    c.to = KindName(ident("target kind"));
    if (accept_word("inverse")) c.inverseOf = ConversionName(ident("inverse conversion"));
    expect(Tok::equals, "'='");
    expect_word("affine");
    expect(Tok::lparen, "'('");
    c.scale = number();
    expect(Tok::comma, "','");
    c.offset = number();
    expect(Tok::rparen, "')'");
    expect(Tok::semi, "';'");
    SourceSpan sp = span_from(start);
    if (!claim(d_conversions, c.name.str(), "conversion", sp)) return;
    d_result.model.spans.set("conversion:" + c.name.str(), sp);
    d_result.model.conversions.push_back(std::move(c));
  }

  MereologyExpr mereology_expr()
  {
    if (accept_word("empty")) return MereologyExpr::empty();
    std::vector<MereologyExpr> factors;
    factors.push_back(mereology_term());
    while (accept_word("x")) factors.push_back(mereology_term());
    if (factors.size() == 1) return std::move(factors.front());
    return MereologyExpr::product(std::move(factors));
  }

  MereologyExpr mereology_term()
  {
    if (accept(Tok::lparen))
    {
      MereologyExpr inner = mereology_expr();
      expect(Tok::rparen, "')'");
      if (inner.form != MereologyExpr::Form::product) return inner;
      return inner;
    }
    IdTypeName id(ident("unique identifier type"));
    if (peek().kind == Tok::minus && peek(1).kind == Tok::ident && peek(1).text == "set")
    {
      next();
      next();
      return MereologyExpr::set_of(std::move(id));
    }
    return MereologyExpr::single(std::move(id));
  }

  void endurant(EndurantKind kind)
  {
    std::size_t start = d_pos;
    next();
    EndurantDecl e;
    e.kind = kind;
    e.discreteness = kind == EndurantKind::material ? Discreteness::continuous : Discreteness::discrete;
    const Token& name_tok = peek();
    e.name = SortName(ident("sort name"));
    std::string sort = e.name.str();
    if (accept_word("composite"))
    {
      e.composite = true;
      expect(Tok::lparen, "'('");
      if (!accept(Tok::rparen))
      {
        do
        {
          const Token& ct = peek();
          e.children.push_back(SortName(ident("child sort")));
          d_result.model.spans.set("child:" + sort + "." + e.children.back().str(), span_of(ct));
        } while (accept(Tok::comma));
        expect(Tok::rparen, "')'");
      }
    }
    expect(Tok::lbrace, "'{'");
    std::set<std::string> attr_names, init_names;
    bool have_mereo = false, have_behaviour = false, have_doc = false;
    while (!accept(Tok::rbrace))
    {
      std::size_t item = d_pos;
      if (accept_word("id"))
      {
        IdTypeName id(ident("unique identifier type"));
        expect(Tok::semi, "';'");
        SourceSpan sp = span_from(item);
        if (e.idType)
          error("E002", "duplicate id clause '" + id.str() + "' in " + sort, sp);
        else if (claim(d_ids, id.str(), "unique identifier type", sp))
        {
          e.idType = id;
          d_result.model.spans.set("id:" + sort, sp);
        }
      }
      else if (accept_word("mereo"))
      {
        MereologyExpr m = mereology_expr();
        expect(Tok::semi, "';'");
        SourceSpan sp = span_from(item);
        if (have_mereo)
          error("E002", "duplicate mereo clause in " + sort, sp);
        else
        {
          have_mereo = true;
          e.mereology = std::move(m);
          d_result.model.spans.set("mereo:" + sort, sp);
        }
      }
      else if (accept_word("attr"))
      {
        AttributeDecl a;
        a.name = AttrName(ident("attribute name"));
        expect(Tok::colon, "':'");
        a.quantity = KindName(ident("quantity kind"));
        if (peek().kind == Tok::ident)
        {
          const Token& ct = peek();
          auto cat = category_from_string(ct.text);
          if (!cat) fail("unknown attribute category '" + ct.text + "'");
          next();
          a.category = *cat;
        }
        expect(Tok::semi, "';'");
        SourceSpan sp = span_from(item);
        if (claim(attr_names, a.name.str(), "attribute", sp))
        {
          d_result.model.spans.set("attr:" + sort + "." + a.name.str(), sp);
          e.attributes.push_back(std::move(a));
        }
      }
      else if (accept_word("init"))
      {
        InitDecl i;
        i.attr = AttrName(ident("attribute name"));
        expect(Tok::equals, "'='");
        i.value = expect(Tok::string, "quoted value").text;
        expect(Tok::semi, "';'");
        SourceSpan sp = span_from(item);
        if (claim(init_names, i.attr.str(), "init", sp))
        {
          d_result.model.spans.set("init:" + sort + "." + i.attr.str(), sp);
          e.inits.push_back(std::move(i));
        }
      }
      else if (accept_word("behaviour"))
      {
        BehaviourNaming b;
        b.process = ident("behaviour name");
        b.abbrev = ident("channel abbreviation");
        expect(Tok::semi, "';'");
        if (have_behaviour)
          error("E002", "duplicate behaviour clause in " + sort, span_from(item));
        else
        {
          have_behaviour = true;
          e.behaviour = std::move(b);
        }
      }
      else if (accept_word("doc"))
      {
        std::string text = expect(Tok::string, "quoted text").text;
        expect(Tok::semi, "';'");
        if (have_doc)
          error("E002", "duplicate doc clause in " + sort, span_from(item));
        else
        {
          have_doc = true;
          e.doc = std::move(text);
        }
      }
      else
        fail("expected id, mereo, attr, init, behaviour, doc or '}', found " + describe(peek()));
    }
    SourceSpan sp = span_from(start);
    sp.endLine = name_tok.endLine;
    sp.endCol = name_tok.endCol;
    if (!claim(d_sorts, sort, "sort", span_of(name_tok))) return;
    d_result.model.spans.set("sort:" + sort, sp);
    d_result.model.endurants.push_back(std::move(e));
  }

  void channel()
  {
    std::size_t start = d_pos;
    next();
    ChannelDecl c;
    c.name = ChannelName(ident("channel name"));
    expect(Tok::colon, "':'");
    c.message.push_back(KindName(ident("message kind")));
    while (accept_word("x")) c.message.push_back(KindName(ident("message kind")));
    expect(Tok::semi, "';'");
    SourceSpan sp = span_from(start);
    if (!claim(d_channels, c.name.str(), "channel", sp)) return;
    d_result.model.spans.set("channel:" + c.name.str(), sp);
    d_result.model.channels.push_back(std::move(c));
  }

  std::pair<SortName, AttrName> qualified(const char* what)
  {
    SortName s(ident(what));
    expect(Tok::dot, "'.'");
    AttrName a(ident("attribute name"));
    return {std::move(s), std::move(a)};
  }

  void axiom()
  {
    std::size_t start = d_pos;
    next();
    AxiomDecl ax;
    ax.name = ident("axiom name");
    expect(Tok::lbrace, "'{'");
    expect_word("display");
    expect(Tok::lparen, "'('");
    std::size_t target_tok = d_pos;
    do
    {
      std::size_t at = d_pos;
      auto [s, a] = qualified("target sort");
      if (ax.targetAttrs.empty())
        ax.target = s;
      else if (s != ax.target)
        throw SyntaxError{"display targets must all belong to one sort", d_toks[at]};
      ax.targetAttrs.push_back(a);
    } while (accept(Tok::comma));
    SourceSpan target_span = span_from(target_tok);
    expect(Tok::rparen, "')'");
    expect_word("tracks");
    expect(Tok::lparen, "'('");
    std::vector<SourceSpan> source_spans;
    do
    {
      std::size_t at = d_pos;
      AxiomDecl::Source src;
      std::tie(src.sort, src.attr) = qualified("source sort");
      if (accept_word("via"))
      {
        src.chain.push_back(ConversionName(ident("conversion name")));
        while (accept(Tok::arrow)) src.chain.push_back(ConversionName(ident("conversion name")));
      }
      source_spans.push_back(span_from(at));
      ax.sources.push_back(std::move(src));
    } while (accept(Tok::comma));
    expect(Tok::rparen, "')'");
    expect(Tok::semi, "';'");
    expect(Tok::rbrace, "'}'");
    SourceSpan sp = span_from(start);
    if (!claim(d_axioms, ax.name, "axiom", sp)) return;
    d_result.model.spans.set("axiom:" + ax.name, sp);
    d_result.model.spans.set("axiom-target:" + ax.name, target_span);
    for (std::size_t i = 0; i < source_spans.size(); ++i)
      d_result.model.spans.set("axiom-source:" + ax.name + "." + std::to_string(i), source_spans[i]);
    d_result.model.axioms.push_back(std::move(ax));
  }

  TypeExpr type_expr()
  {
    if (accept_word("empty")) return TypeExpr{};
    std::vector<TypeExpr> factors;
    factors.push_back(type_term());
    while (accept_word("x")) factors.push_back(type_term());
    if (factors.size() == 1) return std::move(factors.front());
    return TypeExpr{TypeExpr::Form::product, {}, std::move(factors)};
  }

  TypeExpr type_term()
  {
    if (accept(Tok::lparen))
    {
      TypeExpr inner = type_expr();
      expect(Tok::rparen, "')'");
      return inner;
    }
    std::string n = ident("type name");
    if ((n == "AT" || n == "AV") && accept(Tok::lparen))
    {
      std::string k = ident("quantity kind");
      expect(Tok::rparen, "')'");
      return TypeExpr{n == "AT" ? TypeExpr::Form::attrType : TypeExpr::Form::attrValue, k, {}};
    }
    if (peek().kind == Tok::minus && peek(1).kind == Tok::ident && peek(1).text == "set")
    {
      next();
      next();
      return TypeExpr{TypeExpr::Form::set, n, {}};
    }
    return TypeExpr::named(n);
  }

  void type_stmt()
  {
    std::size_t start = d_pos;
    next();
    TypeStmt t;
    do
      t.names.push_back(ident("type name"));
    while (accept(Tok::comma));
    expect(Tok::semi, "';'");
    push_description(std::move(t), start);
  }

  void observer_stmt()
  {
    std::size_t start = d_pos;
    next();
    ObserverStmt o;
    o.name = ident("observer name");
    expect(Tok::colon, "':'");
    o.domain = SortName(ident("sort name"));
    expect(Tok::arrow, "'->'");
    o.codomain = type_expr();
    expect(Tok::semi, "';'");
    push_description(std::move(o), start);
  }

  void category_stmt()
  {
    std::size_t start = d_pos;
    next();
    CategoryStmt c;
    const Token& ct = peek();
    auto cat = category_from_string(ident("attribute category"));
    if (!cat) throw SyntaxError{"unknown attribute category '" + ct.text + "'", ct};
    c.category = *cat;
    expect(Tok::colon, "':'");
    do
      c.attrs.push_back(qualified("sort name"));
    while (accept(Tok::comma));
    expect(Tok::semi, "';'");
    push_description(std::move(c), start);
  }

  void push_description(DescriptionStmt s, std::size_t start)
  {
    d_result.model.spans.set("desc:" + std::to_string(d_result.model.descriptions.size()), span_from(start));
    d_result.model.descriptions.push_back(std::move(s));
  }

  std::vector<Token> d_toks;
  std::string d_file;
  std::size_t d_pos = 0;
  ParseResult d_result;
  std::set<std::string> d_sorts, d_ids, d_kinds, d_conversions, d_channels, d_axioms;
};

std::string quote(const std::string& s)
{
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ParseResult parse_model(std::string_view text, const std::string& file)
{
  auto toks = Lexer(text).run();
  ParseResult result;
  std::vector<Diagnostic> lex_errors;
  std::vector<Token> clean;
  for (auto& t : toks)
  {
    if (t.kind == Tok::invalid)
    {
      lex_errors.push_back(Diagnostic{Severity::error, "E001",
                                      t.text == "unterminated string" ? "unterminated string"
                                                                      : "unexpected character '" + t.text + "'",
                                      SourceSpan{file, t.line, t.col, t.endLine, t.endCol}});
      continue;
    }
    clean.push_back(std::move(t));
  }
  result = Parser(std::move(clean), file).run();
  result.diagnostics.insert(result.diagnostics.begin(), lex_errors.begin(), lex_errors.end());
  return result;
}

std::string print_descriptions(const std::vector<DescriptionStmt>& stmts)
{
  std::ostringstream os;
  for (const auto& s : stmts)
  {
    if (const auto* t = std::get_if<TypeStmt>(&s))
    {
      os << "type ";
      for (std::size_t i = 0; i < t->names.size(); ++i) os << (i ? ", " : "") << t->names[i];
      os << ";\n";
    }
    else if (const auto* o = std::get_if<ObserverStmt>(&s))
      os << "value " << o->name << " : " << o->domain << " -> " << o->codomain.to_string() << ";\n";
    else if (const auto* c = std::get_if<CategoryStmt>(&s))
    {
      os << "category " << to_string(c->category) << " : ";
      for (std::size_t i = 0; i < c->attrs.size(); ++i)
        os << (i ? ", " : "") << c->attrs[i].first << "." << c->attrs[i].second;
      os << ";\n";
    }
  }
  return os.str();
}

std::string print_model(const DomainModel& m)
{
  std::vector<std::string> sections;

  if (!m.quantities.empty())
  {
    std::ostringstream os;
    for (const auto& q : m.quantities)
    {
      os << "quantity " << q.name << " : " << q.role << " " << quote(q.unit);
      if (q.intervalKind) os << " interval " << *q.intervalKind;
      if (q.meanKind) os << " mean " << *q.meanKind;
      if (q.ordered) os << " ordered";
      os << ";\n";
    }
    sections.push_back(os.str());
  }
  if (!m.rules.empty())
  {
    std::ostringstream os;
    for (const auto& r : m.rules)
      os << "rule " << r.op << "(" << r.lhs << ", " << r.rhs << ") = "
         << (r.result ? r.result->str() : std::string("forbidden")) << ";\n";
    sections.push_back(os.str());
  }
  if (!m.conversions.empty())
  {
    std::ostringstream os;
    for (const auto& c : m.conversions)
    {
      os << "conversion " << c.name << " : " << c.from << " -> " << c.to;
      if (c.inverseOf) os << " inverse " << *c.inverseOf;
      os << " = affine(" << c.scale << ", " << c.offset << ");\n";
    }
    sections.push_back(os.str());
  }
  if (!m.endurants.empty())
  {
    std::ostringstream os;
    for (std::size_t i = 0; i < m.endurants.size(); ++i)
    {
      const auto& e = m.endurants[i];
      if (i) os << "\n";
      os << to_string(e.kind) << " " << e.name;
      if (e.composite)
      {
        os << " composite(";
        for (std::size_t c = 0; c < e.children.size(); ++c) os << (c ? ", " : "") << e.children[c];
        os << ")";
      }
      os << " {\n";
      if (e.doc) os << "  doc " << quote(*e.doc) << ";\n";
      if (e.behaviour) os << "  behaviour " << e.behaviour->process << " " << e.behaviour->abbrev << ";\n";
      if (e.idType) os << "  id " << *e.idType << ";\n";
      if (e.mereology) os << "  mereo " << e.mereology->to_string() << ";\n";
      for (const auto& a : e.attributes)
        os << "  attr " << a.name << " : " << a.quantity << " " << to_string(a.category) << ";\n";
      for (const auto& in : e.inits) os << "  init " << in.attr << " = " << quote(in.value) << ";\n";
      os << "}\n";
    }
    sections.push_back(os.str());
  }
  if (!m.channels.empty())
  {
    std::ostringstream os;
    for (const auto& c : m.channels)
    {
      os << "channel " << c.name << " : ";
      for (std::size_t i = 0; i < c.message.size(); ++i) os << (i ? " x " : "") << c.message[i];
      os << ";\n";
    }
    sections.push_back(os.str());
  }
  if (!m.axioms.empty())
  {
    std::ostringstream os;
    for (const auto& ax : m.axioms)
    {
      os << "axiom " << ax.name << " {\n  display(";
      for (std::size_t i = 0; i < ax.targetAttrs.size(); ++i)
        os << (i ? ", " : "") << ax.target << "." << ax.targetAttrs[i];
      os << ") tracks (";
      for (std::size_t i = 0; i < ax.sources.size(); ++i)
      {
        const auto& s = ax.sources[i];
        os << (i ? ", " : "") << s.sort << "." << s.attr;
        for (std::size_t c = 0; c < s.chain.size(); ++c) os << (c ? " -> " : " via ") << s.chain[c];
      }
      os << ");\n}\n";
    }
    sections.push_back(os.str());
  }
  if (!m.descriptions.empty()) sections.push_back(print_descriptions(m.descriptions));

  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i)
  {
    if (i) out += "\n";
    out += sections[i];
  }
  return out;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace domcalc::dsl

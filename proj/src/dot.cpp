#include "ceal/dot.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ceal {

namespace {

enum class Tok { id, lbrace, rbrace, lbracket, rbracket, semi, comma, equals, arrow, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space_and_comments();
        if (pos_ >= src_.size()) return {Tok::end, "", line_};
        const char c = src_[pos_];
        const std::size_t line = line_;
        switch (c) {
            case '{': ++pos_; return {Tok::lbrace, "{", line};
            case '}': ++pos_; return {Tok::rbrace, "}", line};
            case '[': ++pos_; return {Tok::lbracket, "[", line};
            case ']': ++pos_; return {Tok::rbracket, "]", line};
            case ';': ++pos_; return {Tok::semi, ";", line};
            case ',': ++pos_; return {Tok::comma, ",", line};
            case '=': ++pos_; return {Tok::equals, "=", line};
            case '"': return quoted();
            default: break;
        }
        if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            pos_ += 2;
            return {Tok::arrow, "->", line};
        }
        if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
            throw DotParseError(line, "undirected edges are not supported");
        }
        if (is_id_char(c)) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && is_id_char(src_[pos_])) ++pos_;
            return {Tok::id, std::string(src_.substr(start, pos_ - start)), line};
        }
        throw DotParseError(line, std::string("unexpected character '") + c + "'");
    }

private:
    static bool is_id_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.' ||
               static_cast<unsigned char>(c) >= 0x80;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
                ++pos_;
            } else if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                pos_ += 2;
                while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
                    if (src_[pos_] == '\n') ++line_;
                    ++pos_;
                }
                pos_ += 2;
            } else {
                break;
            }
        }
    }

    Token quoted() {
        const std::size_t line = line_;
        ++pos_;
        std::string out;
        while (pos_ < src_.size() && src_[pos_] != '"') {
            if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
                const char e = src_[pos_ + 1];
                if (e == '"' || e == '\\') {
                    out.push_back(e);
                    pos_ += 2;
                    continue;
                }
                if (e == '\n') {  // line continuation
                    ++line_;
                    pos_ += 2;
                    continue;
                }
            }
            if (src_[pos_] == '\n') ++line_;
            out.push_back(src_[pos_++]);
        }
        if (pos_ >= src_.size()) throw DotParseError(line, "unterminated string");
        ++pos_;
        return {Tok::id, std::move(out), line};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
    return std::string(s.substr(b, e - b));
}

bool is_start_node(const std::string& name) { return name.rfind("__start", 0) == 0; }

struct RawEdge {
    std::string from;
    std::string to;
    std::optional<std::string> label;
    std::size_t line;
};

struct RawNode {
    std::string name;
    std::size_t line;
    bool initial_attr = false;
};

using Attributes = std::vector<std::pair<std::string, std::string>>;

class GraphReader {
public:
    explicit GraphReader(std::string_view text) : lex_(text) { advance(); }

    void read() {
        if (cur_.kind == Tok::id && (cur_.text == "strict")) advance();
        if (cur_.kind != Tok::id || cur_.text != "digraph") {
            throw DotParseError(cur_.line, "expected 'digraph'");
        }
        advance();
        if (cur_.kind == Tok::id) advance();
        expect(Tok::lbrace, "'{'");
        while (cur_.kind != Tok::rbrace) {
            if (cur_.kind == Tok::end) throw DotParseError(cur_.line, "missing '}'");
            statement();
        }
        advance();
        if (cur_.kind != Tok::end) throw DotParseError(cur_.line, "trailing content after graph");
    }

    std::vector<RawNode> nodes;
    std::unordered_map<std::string, std::size_t> node_index;
    std::vector<RawEdge> edges;

private:
    void advance() { cur_ = lex_.next(); }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) throw DotParseError(cur_.line, std::string("expected ") + what);
        advance();
    }

    RawNode& touch(const std::string& name, std::size_t line) {
        auto [it, inserted] = node_index.emplace(name, nodes.size());
        if (inserted) nodes.push_back(RawNode{name, line});
        return nodes[it->second];
    }

    Attributes attributes() {
        Attributes attrs;
        while (cur_.kind == Tok::lbracket) {
            advance();
            while (cur_.kind != Tok::rbracket) {
                if (cur_.kind != Tok::id) throw DotParseError(cur_.line, "expected attribute name");
                std::string key = cur_.text;
                advance();
                std::string value = "true";
                if (cur_.kind == Tok::equals) {
                    advance();
                    if (cur_.kind != Tok::id) {
                        throw DotParseError(cur_.line, "expected attribute value");
                    }
                    value = cur_.text;
                    advance();
                }
                attrs.emplace_back(std::move(key), std::move(value));
                if (cur_.kind == Tok::comma || cur_.kind == Tok::semi) advance();
            }
            advance();
        }
        return attrs;
    }

    static std::optional<std::string> lookup(const Attributes& attrs, std::string_view key) {
        for (const auto& [k, v] : attrs) {
            if (k == key) return v;
        }
        return std::nullopt;
    }

    void statement() {
        if (cur_.kind == Tok::semi) {
            advance();
            return;
        }
        if (cur_.kind != Tok::id) throw DotParseError(cur_.line, "expected statement");
        const Token head = cur_;
        advance();

        if (head.text == "subgraph") throw DotParseError(head.line, "subgraphs are not supported");
        if ((head.text == "graph" || head.text == "node" || head.text == "edge") &&
            cur_.kind == Tok::lbracket) {
            attributes();
            return;
        }
        if (cur_.kind == Tok::equals) {  // graph-level a = b
            advance();
            if (cur_.kind != Tok::id) throw DotParseError(cur_.line, "expected value");
            advance();
            return;
        }
        if (cur_.kind == Tok::arrow) {
            std::vector<Token> chain{head};
            while (cur_.kind == Tok::arrow) {
                advance();
                if (cur_.kind != Tok::id) throw DotParseError(cur_.line, "expected edge target");
                chain.push_back(cur_);
                advance();
            }
            const Attributes attrs = attributes();
            auto label = lookup(attrs, "label");
            if (label && trim(*label).empty()) label.reset();
            for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
                touch(chain[k].text, chain[k].line);
                touch(chain[k + 1].text, chain[k + 1].line);
                edges.push_back(RawEdge{chain[k].text, chain[k + 1].text, label, chain[k].line});
            }
            return;
        }
        const Attributes attrs = attributes();
        RawNode& node = touch(head.text, head.line);
        if (auto init = lookup(attrs, "initial"); init && (*init == "true" || *init == "1")) {
            node.initial_attr = true;
        }
    }

    Lexer lex_;
    Token cur_{Tok::end, "", 0};
};

}  // namespace

MealyModel parse_dot(std::string_view text) {
    GraphReader g(text);
    g.read();

    std::vector<std::string> state_names;
    std::unordered_map<std::string, StateId> state_of;
    std::vector<std::size_t> state_line;
    for (const auto& n : g.nodes) {
        if (is_start_node(n.name)) continue;
        state_of.emplace(n.name, static_cast<StateId>(state_names.size()));
        state_names.push_back(n.name);
        state_line.push_back(n.line);
    }
    if (state_names.empty()) throw DotParseError(1, "graph has no states");

    // Split labels and collect alphabets.
    struct Labeled {
        StateId from;
        StateId to;
        std::string in;
        std::string out;
        std::size_t line;
    };
    std::vector<Labeled> transitions;
    std::map<std::string, std::vector<const RawEdge*>> start_edges;
    std::set<std::string> in_names, out_names;
    for (const auto& e : g.edges) {
        if (is_start_node(e.from)) {
            if (e.label) throw DotParseError(e.line, "start edge must be unlabeled");
            start_edges[e.from].push_back(&e);
            continue;
        }
        if (is_start_node(e.to)) throw DotParseError(e.line, "edge into start node");
        if (!e.label) throw DotParseError(e.line, "missing label on edge " + e.from + " -> " + e.to);
        const auto slash = e.label->find('/');
        if (slash == std::string::npos) {
            throw DotParseError(e.line, "label '" + *e.label + "' is not of the form input/output");
        }
        std::string in = trim(std::string_view(*e.label).substr(0, slash));
        std::string out = trim(std::string_view(*e.label).substr(slash + 1));
        if (in.empty() || out.empty()) throw DotParseError(e.line, "empty input or output in label");
        in_names.insert(in);
        out_names.insert(out);
        transitions.push_back(Labeled{state_of.at(e.from), state_of.at(e.to), std::move(in),
                                      std::move(out), e.line});
    }
    if (transitions.empty()) throw DotParseError(1, "graph has no labeled transitions");

    Alphabet inputs(std::vector<std::string>(in_names.begin(), in_names.end()));
    Alphabet outputs(std::vector<std::string>(out_names.begin(), out_names.end()));

    // Initial state.
    std::optional<StateId> initial;
    if (!start_edges.empty()) {
        std::set<StateId> targets;
        for (const auto& [name, list] : start_edges) {
            if (list.size() != 1) {
                throw DotParseError(list.front()->line,
                                    "unresolvable initial state: '" + name + "' has " +
                                        std::to_string(list.size()) + " out-edges");
            }
            targets.insert(state_of.at(list.front()->to));
        }
        if (targets.size() != 1) {
            throw DotParseError(start_edges.begin()->second.front()->line,
                                "unresolvable initial state: start nodes disagree");
        }
        initial = *targets.begin();
    } else {
        std::vector<const RawNode*> flagged;
        for (const auto& n : g.nodes) {
            if (n.initial_attr && !is_start_node(n.name)) flagged.push_back(&n);
        }
        if (flagged.size() > 1) {
            throw DotParseError(flagged[1]->line, "unresolvable initial state: several initial=true");
        }
        initial = flagged.empty() ? StateId{0} : state_of.at(flagged.front()->name);
    }

    MealyMachine m(state_names.size(), inputs.size(), outputs.size(), *initial);
    std::vector<std::size_t> defined_at(state_names.size() * inputs.size(), 0);
    for (const auto& t : transitions) {
        const Symbol a = inputs.index(t.in);
        const Symbol b = outputs.index(t.out);
        auto& line = defined_at[static_cast<std::size_t>(t.from) * inputs.size() + a];
        if (line != 0) {
            if (m.next(t.from, a) != t.to || m.output(t.from, a) != b) {
                throw DotParseError(t.line, "conflicting edges for state '" + state_names[t.from] +
                                                "' on input '" + t.in + "' (first at line " +
                                                std::to_string(line) + ")");
            }
            continue;
        }
        line = t.line;
        m.set_transition(t.from, a, t.to, b);
    }
    for (StateId q = 0; q < state_names.size(); ++q) {
        for (Symbol a = 0; a < inputs.size(); ++a) {
            if (defined_at[static_cast<std::size_t>(q) * inputs.size() + a] == 0) {
                throw DotParseError(state_line[q], "non-total machine: state '" + state_names[q] +
                                                       "' has no edge for input '" +
                                                       inputs.name(a) + "'");
            }
        }
    }
    return MealyModel{std::move(m), std::move(inputs), std::move(outputs), std::move(state_names)};
}

MealyModel load_dot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dot(buf.str());
}

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string write_dot(const MealyMachine& m, const Alphabet& inputs, const Alphabet& outputs,
                      std::span<const std::string> state_names) {
    if (inputs.size() != m.num_inputs() || outputs.size() < m.num_outputs()) {
        throw DomainError("write_dot: alphabet sizes do not match the machine");
    }
    const auto name = [&](StateId q) {
        return q < state_names.size() ? state_names[q] : "s" + std::to_string(q);
    };
    std::ostringstream os;
    os << "digraph g {\n";
    for (StateId q = 0; q < m.num_states(); ++q) {
        os << "\t" << quote(name(q)) << " [shape=\"circle\" label=" << quote(name(q)) << "];\n";
    }
    for (StateId q = 0; q < m.num_states(); ++q) {
        for (Symbol a = 0; a < m.num_inputs(); ++a) {
            os << "\t" << quote(name(q)) << " -> " << quote(name(m.next(q, a)))
               << " [label=" << quote(inputs.name(a) + " / " + outputs.name(m.output(q, a)))
               << "];\n";
        }
    }
    os << "\t__start0 [label=\"\" shape=\"none\"];\n";
    os << "\t__start0 -> " << quote(name(m.initial())) << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace ceal

#include "ftbdd/galileo.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace ftbdd {

std::string_view toString(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::Syntax:
            return "syntax error";
        case ParseErrorKind::UndeclaredReference:
            return "undeclared reference";
        case ParseErrorKind::DuplicateDeclaration:
            return "duplicate declaration";
        case ParseErrorKind::MissingToplevel:
            return "missing toplevel";
        case ParseErrorKind::InvalidAttribute:
            return "invalid attribute value";
        case ParseErrorKind::InvalidTree:
            return "invalid tree";
    }
    return "error";
}

namespace {

std::string formatMessage(ParseErrorKind kind, std::size_t line, std::size_t column, std::string const& message) {
    std::ostringstream out;
    if (line > 0) {
        out << line << ":" << column << ": ";
    }
    out << toString(kind);
    if (!message.empty()) {
        out << ": " << message;
    }
    return out.str();
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, std::string const& message)
    : std::runtime_error(formatMessage(kind, line, column, message)), kind_(kind), line_(line), column_(column) {}

namespace {

struct Token {
    enum class Kind { Name, Word, Semicolon } kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

[[noreturn]] void fail(ParseErrorKind kind, Token const& at, std::string const& message) {
    throw ParseError(kind, at.line, at.column, message);
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };
    auto isSpace = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };

    while (i < text.size()) {
        char c = text[i];
        if (isSpace(c)) {
            advance(1);
        } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') {
                advance(1);
            }
        } else if (c == ';') {
            tokens.push_back({Token::Kind::Semicolon, ";", line, column});
            advance(1);
        } else if (c == '"') {
            Token token{Token::Kind::Name, "", line, column};
            advance(1);
            while (i < text.size() && text[i] != '"' && text[i] != '\n') {
                token.text.push_back(text[i]);
                advance(1);
            }
            if (i >= text.size() || text[i] != '"') {
                throw ParseError(ParseErrorKind::Syntax, token.line, token.column, "unterminated name");
            }
            advance(1);
            if (token.text.empty()) {
                throw ParseError(ParseErrorKind::Syntax, token.line, token.column, "empty name");
            }
            tokens.push_back(std::move(token));
        } else {
            Token token{Token::Kind::Word, "", line, column};
            while (i < text.size() && !isSpace(text[i]) && text[i] != ';' && text[i] != '"') {
                if (text[i] == '/' && i + 1 < text.size() && text[i + 1] == '/') {
                    break;
                }
                token.text.push_back(text[i]);
                advance(1);
            }
            tokens.push_back(std::move(token));
        }
    }
    return tokens;
}

std::optional<double> parseNumber(std::string_view text) {
    double value = 0.0;
    auto const* begin = text.data();
    auto const* end = text.data() + text.size();
    if (begin != end && *begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || begin == end) {
        return std::nullopt;
    }
    return value;
}

std::optional<unsigned> parseCount(std::string_view text) {
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

struct Declaration {
    Node node;
    Token at;
    std::vector<Token> childRefs;
};

/// Gate keyword parsing; fills type/threshold/probability/keyword on `node`.
bool readGateKeyword(Token const& word, Node& node, std::optional<unsigned>& declaredArity) {
    std::string const& w = word.text;
    if (w == "and") {
        node.type = NodeType::And;
    } else if (w == "or") {
        node.type = NodeType::Or;
    } else if (w == "pand") {
        node.type = NodeType::Pand;
    } else if (w == "por") {
        node.type = NodeType::Por;
    } else if (w == "seq") {
        node.type = NodeType::Seq;
    } else if (w == "fdep") {
        node.type = NodeType::Pdep;
        node.dependencyProbability = 1.0;
        node.keyword = "fdep";
    } else if (w.starts_with("pdep=")) {
        node.type = NodeType::Pdep;
        auto p = parseNumber(std::string_view(w).substr(5));
        if (!p) {
            fail(ParseErrorKind::Syntax, word, "malformed number in '" + w + "'");
        }
        if (!(*p > 0.0 && *p <= 1.0)) {
            fail(ParseErrorKind::InvalidAttribute, word, "pdep probability must lie in (0,1]");
        }
        node.dependencyProbability = *p;
        node.keyword = "pdep";
    } else if (w == "wsp" || w == "csp" || w == "hsp") {
        node.type = NodeType::Spare;
        node.keyword = w;
    } else if (auto of = w.find("of"); of != std::string::npos && of > 0) {
        auto k = parseCount(std::string_view(w).substr(0, of));
        auto n = parseCount(std::string_view(w).substr(of + 2));
        if (!k || !n) {
            return false;
        }
        node.type = NodeType::Vot;
        node.threshold = *k;
        declaredArity = *n;
    } else {
        return false;
    }
    return true;
}

void readBasicEventAttributes(std::vector<Token> const& statement, Node& node) {
    std::optional<double> lambda;
    std::optional<double> dormancy;
    std::optional<double> probability;
    for (std::size_t i = 1; i < statement.size(); ++i) {
        Token const& token = statement[i];
        if (token.kind != Token::Kind::Word) {
            fail(ParseErrorKind::Syntax, token, "expected attribute, found name \"" + token.text + "\"");
        }
        auto eq = token.text.find('=');
        if (eq == std::string::npos) {
            fail(ParseErrorKind::Syntax, token, "expected attribute, found '" + token.text + "'");
        }
        std::string key = token.text.substr(0, eq);
        auto value = parseNumber(std::string_view(token.text).substr(eq + 1));
        if (!value) {
            fail(ParseErrorKind::Syntax, token, "malformed number in '" + token.text + "'");
        }
        std::optional<double>* slot = nullptr;
        if (key == "lambda") {
            slot = &lambda;
        } else if (key == "dorm") {
            slot = &dormancy;
        } else if (key == "prob") {
            slot = &probability;
        } else {
            fail(ParseErrorKind::Syntax, token, "unknown attribute '" + key + "'");
        }
        if (slot->has_value()) {
            fail(ParseErrorKind::Syntax, token, "attribute '" + key + "' given twice");
        }
        *slot = *value;
        if (key == "lambda" && !(*value > 0.0)) {
            fail(ParseErrorKind::InvalidAttribute, token, "lambda must be positive");
        }
        if (key == "dorm" && !(*value >= 0.0 && *value <= 1.0)) {
            fail(ParseErrorKind::InvalidAttribute, token, "dorm must lie in [0,1]");
        }
        if (key == "prob" && !(*value >= 0.0 && *value <= 1.0)) {
            fail(ParseErrorKind::InvalidAttribute, token, "prob must lie in [0,1]");
        }
    }
    Token const& at = statement.front();
    if (lambda && probability) {
        fail(ParseErrorKind::InvalidAttribute, at, "basic event \"" + node.name + "\" has both lambda and prob");
    }
    if (probability) {
        if (dormancy) {
            fail(ParseErrorKind::InvalidAttribute, at, "dorm requires lambda");
        }
        node.distribution = ConstantProbability{*probability};
    } else if (lambda) {
        node.distribution = ExponentialDistribution{*lambda, dormancy.value_or(1.0)};
    } else {
        fail(ParseErrorKind::InvalidAttribute, at, "basic event \"" + node.name + "\" needs lambda or prob");
    }
}

}  // namespace

GalileoModel parseGalileo(std::string_view text) {
    auto tokens = tokenize(text);

    std::optional<Token> toplevel;
    std::vector<Declaration> declarations;
    std::unordered_map<std::string, std::size_t> declared;

    std::size_t pos = 0;
    while (pos < tokens.size()) {
        std::vector<Token> statement;
        while (pos < tokens.size() && tokens[pos].kind != Token::Kind::Semicolon) {
            statement.push_back(tokens[pos++]);
        }
        if (pos >= tokens.size()) {
            fail(ParseErrorKind::Syntax, statement.front(), "missing ';' at end of statement");
        }
        Token const& semicolon = tokens[pos++];
        if (statement.empty()) {
            fail(ParseErrorKind::Syntax, semicolon, "empty statement");
        }
        Token const& head = statement.front();

        if (head.kind == Token::Kind::Word) {
            if (head.text != "toplevel") {
                fail(ParseErrorKind::Syntax, head, "unexpected '" + head.text + "'");
            }
            if (statement.size() != 2 || statement[1].kind != Token::Kind::Name) {
                fail(ParseErrorKind::Syntax, head, "expected toplevel \"<name>\"");
            }
            if (toplevel) {
                fail(ParseErrorKind::DuplicateDeclaration, head, "second toplevel statement");
            }
            toplevel = statement[1];
            continue;
        }

        if (statement.size() < 2) {
            fail(ParseErrorKind::Syntax, head, "declaration of \"" + head.text + "\" has no body");
        }
        if (declared.contains(head.text)) {
            fail(ParseErrorKind::DuplicateDeclaration, head, "\"" + head.text + "\" declared twice");
        }
        Declaration decl;
        decl.node.name = head.text;
        decl.at = head;

        Token const& second = statement[1];
        if (second.kind != Token::Kind::Word) {
            fail(ParseErrorKind::Syntax, second, "expected gate keyword or attribute");
        }
        std::optional<unsigned> declaredArity;
        if (readGateKeyword(second, decl.node, declaredArity)) {
            for (std::size_t i = 2; i < statement.size(); ++i) {
                if (statement[i].kind != Token::Kind::Name) {
                    fail(ParseErrorKind::Syntax, statement[i], "expected child name, found '" + statement[i].text + "'");
                }
                decl.childRefs.push_back(statement[i]);
            }
            if (decl.childRefs.empty()) {
                fail(ParseErrorKind::Syntax, second, "gate \"" + head.text + "\" has no children");
            }
            if (declaredArity) {
                if (*declaredArity != decl.childRefs.size()) {
                    fail(ParseErrorKind::InvalidAttribute, second, "'" + second.text + "' over " + std::to_string(decl.childRefs.size()) + " children");
                }
                if (decl.node.threshold == 0 || decl.node.threshold > *declaredArity) {
                    fail(ParseErrorKind::InvalidAttribute, second, "k out of range in '" + second.text + "'");
                }
            }
        } else if (second.text.find('=') != std::string::npos) {
            decl.node.type = NodeType::BasicEvent;
            readBasicEventAttributes(statement, decl.node);
        } else {
            fail(ParseErrorKind::Syntax, second, "unknown gate type '" + second.text + "'");
        }
        declared.emplace(head.text, declarations.size());
        declarations.push_back(std::move(decl));
    }

    if (!toplevel) {
        throw ParseError(ParseErrorKind::MissingToplevel, 0, 0, "no toplevel statement");
    }

    GalileoModel model;
    for (auto& decl : declarations) {
        Node node = decl.node;
        for (auto const& ref : decl.childRefs) {
            auto it = declared.find(ref.text);
            if (it == declared.end()) {
                fail(ParseErrorKind::UndeclaredReference, ref, "\"" + ref.text + "\" is not declared");
            }
            node.children.push_back(static_cast<NodeId>(it->second));
        }
        NodeId id = model.tree.addNode(std::move(node));
        if (model.tree.node(id).type == NodeType::BasicEvent) {
            model.basicEventOrder.push_back(id);
        }
    }
    auto top = declared.find(toplevel->text);
    if (top == declared.end()) {
        fail(ParseErrorKind::UndeclaredReference, *toplevel, "toplevel \"" + toplevel->text + "\" is not declared");
    }
    model.tree.setTop(static_cast<NodeId>(top->second));

    auto report = validate(model.tree);
    if (!report.ok()) {
        auto const& first = report.violations.front();
        auto it = declared.find(first.node);
        if (it != declared.end()) {
            fail(ParseErrorKind::InvalidTree, declarations[it->second].at, "\"" + first.node + "\": " + first.rule);
        }
        throw ParseError(ParseErrorKind::InvalidTree, 0, 0, first.rule);
    }
    return model;
}

GalileoModel parseGalileoFile(std::filesystem::path const& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw std::runtime_error("cannot read '" + path.string() + "'");
        }
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return parseGalileo(text);
}

namespace {

std::string formatNumber(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

std::string quoted(std::string const& name) {
    if (name.empty() || name.find_first_of("\"\n") != std::string::npos) {
        throw std::invalid_argument("name '" + name + "' cannot be written in Galileo format");
    }
    return "\"" + name + "\"";
}

std::string gateKeyword(Node const& node) {
    switch (node.type) {
        case NodeType::And:
            return "and";
        case NodeType::Or:
            return "or";
        case NodeType::Vot:
            return std::to_string(node.threshold) + "of" + std::to_string(node.children.size());
        case NodeType::Pand:
            return "pand";
        case NodeType::Por:
            return "por";
        case NodeType::Seq:
            return "seq";
        case NodeType::Pdep:
            if (node.dependencyProbability == 1.0 && node.keyword != "pdep") {
                return "fdep";
            }
            return "pdep=" + formatNumber(node.dependencyProbability);
        case NodeType::Spare:
            return node.keyword.empty() ? std::string("wsp") : node.keyword;
        case NodeType::BasicEvent:
            break;
    }
    throw std::logic_error("not a gate");
}

}  // namespace

std::string serializeGalileo(FaultTree const& tree) {
    std::ostringstream out;
    out << "toplevel " << quoted(tree.node(tree.top()).name) << ";\n";
    for (auto const& node : tree.nodes()) {
        out << quoted(node.name);
        if (node.type == NodeType::BasicEvent) {
            if (!node.distribution) {
                throw std::invalid_argument("basic event '" + node.name + "' has no distribution");
            }
            if (auto const* exp = std::get_if<ExponentialDistribution>(&*node.distribution)) {
                out << " lambda=" << formatNumber(exp->rate) << " dorm=" << formatNumber(exp->dormancy);
            } else if (auto const* constant = std::get_if<ConstantProbability>(&*node.distribution)) {
                out << " prob=" << formatNumber(constant->probability);
            } else {
                throw std::invalid_argument("tabulated basic event '" + node.name + "' cannot be written in Galileo format");
            }
        } else {
            out << " " << gateKeyword(node);
            for (NodeId child : node.children) {
                out << " " << quoted(tree.node(child).name);
            }
        }
        out << ";\n";
    }
    return out.str();
}

}  // namespace ftbdd

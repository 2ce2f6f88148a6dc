#include "ccq/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ccq::toml {

namespace {

const char* kind(const Value& v) {
    switch (v.v.index()) {
        case 0: return "boolean";
        case 1: return "integer";
        case 2: return "float";
        case 3: return "string";
        default: return "array";
    }
}

[[noreturn]] void type_error(const Value& v, const char* want) {
    throw ParseError(std::string("expected ") + want + ", got " + kind(v));
}

class Parser {
public:
    Parser(const std::string& line, std::size_t lineno, const std::string& src)
        : s_(line), line_(lineno), src_(src) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(src_ + ":" + std::to_string(line_) + ": " + msg);
    }

    void skip_ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
    }
    bool at_end() {
        skip_ws();
        return i_ >= s_.size() || s_[i_] == '#';
    }
    char peek() {
        skip_ws();
        return i_ < s_.size() ? s_[i_] : '\0';
    }

    std::string key() {
        skip_ws();
        const std::size_t b = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '-')) ++i_;
        if (b == i_) fail("expected a key");
        return s_.substr(b, i_ - b);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++i_;
    }

    Value value() {
        const char c = peek();
        if (c == '"') return Value{string()};
        if (c == '[') return Value{array()};
        const std::size_t b = i_;
        while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '#' && s_[i_] != ' ' && s_[i_] != '\t') ++i_;
        std::string tok = s_.substr(b, i_ - b);
        if (tok.empty()) fail("expected a value");
        if (tok == "true") return Value{true};
        if (tok == "false") return Value{false};
        std::string clean;
        for (char ch : tok) {
            if (ch != '_') clean += ch;
        }
        const bool floaty = clean.find_first_of(".eE") != std::string::npos || clean == "inf" || clean == "nan";
        if (!floaty) {
            std::int64_t n = 0;
            const char* f = clean.data();
            if (*f == '+') ++f;
            auto [p, ec] = std::from_chars(f, clean.data() + clean.size(), n);
            if (ec == std::errc() && p == clean.data() + clean.size()) return Value{n};
            fail("bad integer '" + tok + "'");
        }
        try {
            std::size_t used = 0;
            const double d = std::stod(clean, &used);
            if (used != clean.size()) fail("bad number '" + tok + "'");
            return Value{d};
        } catch (const std::logic_error&) {
            fail("bad number '" + tok + "'");
        }
    }

    std::string string() {
        expect('"');
        std::string out;
        while (true) {
            if (i_ >= s_.size()) fail("unterminated string");
            const char c = s_[i_++];
            if (c == '"') break;
            if (c == '\\') {
                if (i_ >= s_.size()) fail("unterminated escape");
                const char e = s_[i_++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    Array array() {
        expect('[');
        Array a;
        if (peek() == ']') {
            ++i_;
            return a;
        }
        while (true) {
            Value v = value();
            if (v.is_array()) fail("nested arrays are not supported");
            a.push_back(std::move(v));
            const char c = peek();
            ++i_;
            if (c == ']') break;
            if (c != ',') fail("expected ',' or ']' in array");
            if (peek() == ']') {
                ++i_;
                break;
            }
        }
        return a;
    }

    std::size_t pos() const { return i_; }
    void set_pos(std::size_t p) { i_ = p; }

private:
    const std::string& s_;
    std::size_t i_ = 0;
    std::size_t line_;
    const std::string& src_;
};

}  // namespace

bool Value::as_bool() const {
    if (!is_bool()) type_error(*this, "boolean");
    return std::get<bool>(v);
}

std::int64_t Value::as_int() const {
    if (!is_int()) type_error(*this, "integer");
    return std::get<std::int64_t>(v);
}

double Value::as_double() const {
    if (is_int()) return static_cast<double>(std::get<std::int64_t>(v));
    if (!std::holds_alternative<double>(v)) type_error(*this, "number");
    return std::get<double>(v);
}

const std::string& Value::as_string() const {
    if (!is_string()) type_error(*this, "string");
    return std::get<std::string>(v);
}

const Array& Value::as_array() const {
    if (!is_array()) type_error(*this, "array");
    return std::get<Array>(v);
}

const Value* Document::find(const std::string& table, const std::string& key) const {
    auto t = tables.find(table);
    if (t == tables.end()) return nullptr;
    auto k = t->second.find(key);
    return k == t->second.end() ? nullptr : &k->second;
}

Document parse(std::istream& is, const std::string& source) {
    Document doc;
    std::string current;
    doc.tables[current];
    std::set<std::string> headers;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        Parser p(line, lineno, source);
        if (p.at_end()) continue;
        if (p.peek() == '[') {
            p.expect('[');
            current = p.key();
            while (p.peek() == '.') {
                p.expect('.');
                current += "." + p.key();
            }
            p.expect(']');
            if (!p.at_end()) p.fail("trailing characters after table header");
            if (!headers.insert(current).second) p.fail("table [" + current + "] defined twice");
            doc.tables[current];
            continue;
        }
        const std::string k = p.key();
        p.expect('=');
        Value v = p.value();
        if (!p.at_end()) p.fail("trailing characters after value");
        auto& t = doc.tables[current];
        if (t.count(k)) p.fail("duplicate key '" + k + "'");
        t.emplace(k, std::move(v));
    }
    return doc;
}

Document parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is, "<string>");
}

Document parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open config file " + path);
    return parse(f, path);
}

}  // namespace ccq::toml

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Small TOML subset: [table] headers, bare keys, strings, integers, floats,
// booleans and flat arrays of those. '#' starts a comment outside strings.
namespace ccq::toml {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<bool, std::int64_t, double, std::string, Array> v;

    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_number() const { return is_int() || std::holds_alternative<double>(v); }
    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_array() const { return std::holds_alternative<Array>(v); }

    bool as_bool() const;
    std::int64_t as_int() const;
    double as_double() const;
    const std::string& as_string() const;
    const Array& as_array() const;
};

using Table = std::map<std::string, Value>;

struct Document {
    std::map<std::string, Table> tables;  // "" holds keys before the first header

    const Value* find(const std::string& table, const std::string& key) const;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Document parse(std::istream& is, const std::string& source = "<input>");
Document parse_string(const std::string& text);
Document parse_file(const std::string& path);

}  // namespace ccq::toml

#include "greybox/netfile.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "greybox/errors.hpp"

namespace greybox {

namespace {

struct Value {
    enum class Kind { String, Number, Array } kind = Kind::Number;
    std::string text;
    double number = 0.0;
    std::vector<Value> items;
    int line = 0;
    int column = 0;
};

struct Entry {
    Value value;
    int line = 0;
    int column = 0;
};

struct Section {
    std::string name;
    int line = 0;
    int column = 0;
    std::map<std::string, Entry> keys;
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    std::vector<Section> read() {
        std::vector<Section> sections;
        while (!at_end()) {
            skip_blank();
            if (at_end()) break;
            const char c = peek();
            if (c == '\n') {
                advance();
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '[') {
                sections.push_back(read_header());
                continue;
            }
            if (sections.empty()) fail("key outside any section");
            read_key_value(sections.back());
        }
        return sections;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, column_); }

    void skip_blank() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
    }
    void skip_comment() {
        while (!at_end() && peek() != '\n') advance();
    }
    // Whitespace, comments and newlines, as allowed inside arrays.
    void skip_space_multiline() {
        for (;;) {
            skip_blank();
            if (at_end()) return;
            if (peek() == '#')
                skip_comment();
            else if (peek() == '\n')
                advance();
            else
                return;
        }
    }
    void end_of_line() {
        skip_blank();
        if (!at_end() && peek() == '#') skip_comment();
        if (!at_end() && peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
    }

    static bool bare_char(char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    }

    Section read_header() {
        Section s;
        s.line = line_;
        s.column = column_;
        advance();
        const bool array = !at_end() && peek() == '[';
        if (array) advance();
        skip_blank();
        std::string name;
        while (!at_end() && bare_char(peek())) {
            name += peek();
            advance();
        }
        skip_blank();
        const bool closed = !at_end() && peek() == ']' && (!array || (pos_ + 1 < text_.size() && text_[pos_ + 1] == ']'));
        if (!closed) {
            // Report the raw header text so the message names the section.
            std::string raw;
            for (std::size_t k = text_.rfind('\n', pos_ == 0 ? 0 : pos_ - 1) + 1; k < text_.size() && text_[k] != '\n'; ++k)
                raw += text_[k];
            throw ParseError("malformed section header '" + raw + "'", s.line, s.column);
        }
        advance();
        if (array) advance();
        static const std::set<std::string> tables = {"meta"};
        static const std::set<std::string> arrays = {"nodes", "branch", "shunt"};
        if (array ? !arrays.count(name) : !tables.count(name)) {
            const std::string shown = array ? "[[" + name + "]]" : "[" + name + "]";
            throw ParseError("unknown section " + shown, s.line, s.column);
        }
        s.name = name;
        end_of_line();
        return s;
    }

    void read_key_value(Section& section) {
        const int line = line_, column = column_;
        std::string key;
        while (!at_end() && bare_char(peek())) {
            key += peek();
            advance();
        }
        if (key.empty()) fail("expected a key");
        skip_blank();
        if (at_end() || peek() != '=') fail("expected '=' after key '" + key + "'");
        advance();
        skip_blank();
        Value v = read_value();
        end_of_line();
        if (section.keys.count(key)) throw ParseError("duplicate key '" + key + "'", line, column);
        section.keys[key] = {std::move(v), line, column};
    }

    Value read_value() {
        if (at_end()) fail("missing value");
        Value v;
        v.line = line_;
        v.column = column_;
        const char c = peek();
        if (c == '"') {
            v.kind = Value::Kind::String;
            advance();
            for (;;) {
                if (at_end() || peek() == '\n') fail("unterminated string");
                char ch = peek();
                advance();
                if (ch == '"') break;
                if (ch == '\\') {
                    if (at_end()) fail("unterminated string");
                    const char e = peek();
                    advance();
                    if (e == 'n')
                        ch = '\n';
                    else if (e == 't')
                        ch = '\t';
                    else if (e == '"' || e == '\\')
                        ch = e;
                    else
                        fail(std::string("unsupported escape '\\") + e + "'");
                }
                v.text += ch;
            }
            return v;
        }
        if (c == '[') {
            v.kind = Value::Kind::Array;
            advance();
            skip_space_multiline();
            if (!at_end() && peek() == ']') {
                advance();
                return v;
            }
            for (;;) {
                skip_space_multiline();
                v.items.push_back(read_value());
                skip_space_multiline();
                if (at_end()) fail("unterminated array");
                if (peek() == ',') {
                    advance();
                    skip_space_multiline();
                    if (!at_end() && peek() == ']') {
                        advance();
                        return v;
                    }
                    continue;
                }
                if (peek() == ']') {
                    advance();
                    return v;
                }
                fail(std::string("unexpected '") + peek() + "' in array");
            }
        }
        std::string token;
        while (!at_end() && (bare_char(peek()) || peek() == '.' || peek() == '+')) {
            token += peek();
            advance();
        }
        if (token.empty()) fail(std::string("unexpected '") + c + "'");
        std::string digits;
        for (char ch : token)
            if (ch != '_') digits += ch;
        const char* first = digits.data();
        if (*first == '+') ++first;
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), x);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || !std::isfinite(x))
            throw ParseError("invalid number '" + token + "'", v.line, v.column);
        v.number = x;
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

[[noreturn]] void fail_at(const std::string& what, int line, int column) { throw ParseError(what, line, column); }

void check_keys(const Section& s, const std::set<std::string>& allowed) {
    for (const auto& [key, entry] : s.keys)
        if (!allowed.count(key)) fail_at("unknown key '" + key + "' in [" + s.name + "]", entry.line, entry.column);
}

const Entry& require(const Section& s, const std::string& key) {
    const auto it = s.keys.find(key);
    if (it == s.keys.end()) fail_at("missing key '" + key + "' in [" + s.name + "]", s.line, s.column);
    return it->second;
}

const Entry* optional(const Section& s, const std::string& key) {
    const auto it = s.keys.find(key);
    return it == s.keys.end() ? nullptr : &it->second;
}

std::string as_string(const Entry& e, const std::string& key) {
    if (e.value.kind != Value::Kind::String) fail_at("'" + key + "' must be a string", e.line, e.column);
    return e.value.text;
}

double as_number(const Entry& e, const std::string& key) {
    if (e.value.kind != Value::Kind::Number) fail_at("'" + key + "' must be a number", e.line, e.column);
    return e.value.number;
}

std::vector<double> as_coeffs(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::Array || v.items.empty())
        fail_at("'" + key + "' must be a non-empty list of coefficients", v.line, v.column);
    std::vector<double> out;
    for (const auto& item : v.items) {
        if (item.kind != Value::Kind::Number) fail_at("'" + key + "' coefficients must be numbers", item.line, item.column);
        out.push_back(item.number);
    }
    return out;
}

// A flat list for a 1-port entry, or an m x m list of lists.
std::vector<std::vector<double>> as_block(const Entry& e, const std::string& key, int& width) {
    const Value& v = e.value;
    if (v.kind != Value::Kind::Array || v.items.empty())
        fail_at("'" + key + "' must be a non-empty list", e.line, e.column);
    if (v.items.front().kind != Value::Kind::Array) {
        width = 1;
        return {as_coeffs(v, key)};
    }
    width = static_cast<int>(v.items.size());
    std::vector<std::vector<double>> out;
    for (const auto& row : v.items) {
        if (row.kind != Value::Kind::Array || static_cast<int>(row.items.size()) != width)
            fail_at("'" + key + "' must be a square block of coefficient lists", row.line, row.column);
        for (const auto& cell : row.items) out.push_back(as_coeffs(cell, key));
    }
    return out;
}

Polynomial to_poly(const std::vector<double>& c) {
    std::vector<Complex> z(c.begin(), c.end());
    return Polynomial(std::span<const Complex>(z));
}

ComponentKind parse_kind(const Entry& e, bool shunt) {
    const std::string k = as_string(e, "kind");
    if (k == "rl") return ComponentKind::SeriesRL;
    if (k == "rational") return ComponentKind::Rational;
    if (shunt) {
        if (k == "c") return ComponentKind::Capacitor;
        if (k == "rlc") return ComponentKind::ParallelRLC;
        if (k == "spectrum") return ComponentKind::Spectrum;
    }
    fail_at("unknown " + std::string(shunt ? "shunt" : "branch") + " kind '" + k + "'", e.value.line, e.value.column);
}

Component parse_component(const Section& s, const NetworkModel& net, bool shunt) {
    Component c;
    c.id = as_string(require(s, "id"), "id");
    const Entry& kind = require(s, "kind");
    c.kind = parse_kind(kind, shunt);

    std::set<std::string> allowed = {"id", "kind"};
    if (shunt)
        allowed.insert("node");
    else
        allowed.insert({"from", "to"});
    switch (c.kind) {
        case ComponentKind::SeriesRL: allowed.insert({"R", "L"}); break;
        case ComponentKind::Capacitor: allowed.insert("C"); break;
        case ComponentKind::ParallelRLC: allowed.insert({"R", "L", "C"}); break;
        case ComponentKind::Rational: allowed.insert({"num", "den"}); break;
        case ComponentKind::Spectrum: allowed.insert("file"); break;
    }
    check_keys(s, allowed);

    const auto node_ref = [&](const std::string& key) {
        const Entry& e = require(s, key);
        const std::string id = as_string(e, key);
        for (std::size_t k = 0; k < net.nodes().size(); ++k)
            if (net.nodes()[k].id == id) return static_cast<int>(k);
        fail_at("unknown node '" + id + "'", e.value.line, e.value.column);
    };
    if (shunt) {
        c.from = node_ref("node");
    } else {
        c.from = node_ref("from");
        c.to = node_ref("to");
    }

    if (c.kind == ComponentKind::Rational) {
        const Entry& num = require(s, "num");
        const Entry& den = require(s, "den");
        RationalBlock b;
        int wn = 0, wd = 0;
        b.num_coeffs = as_block(num, "num", wn);
        b.den_coeffs = as_block(den, "den", wd);
        if (wn != wd) fail_at("'num' and 'den' blocks differ in size", den.line, den.column);
        b.width = wn;
        for (std::size_t k = 0; k < b.num_coeffs.size(); ++k) {
            const Polynomial d = to_poly(b.den_coeffs[k]);
            if (d.is_zero()) fail_at("zero denominator", den.line, den.column);
            b.entries.emplace_back(to_poly(b.num_coeffs[k]), d);
        }
        c.block = std::move(b);
    } else if (c.kind == ComponentKind::Spectrum) {
        c.spectrum_source = as_string(require(s, "file"), "file");
    } else {
        for (const char* p : {"R", "L", "C"})
            if (allowed.count(p)) c.params[p] = as_number(require(s, p), p);
    }
    return c;
}

std::string number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\', out += c;
        else if (c == '\n')
            out += "\\n";
        else if (c == '\t')
            out += "\\t";
        else
            out += c;
    }
    return out + "\"";
}

std::string coeff_list(const std::vector<double>& c) {
    std::string out = "[";
    for (std::size_t k = 0; k < c.size(); ++k) out += (k ? ", " : "") + number(c[k]);
    return out + "]";
}

std::string block_list(const RationalBlock& b, const std::vector<std::vector<double>>& c) {
    if (b.width == 1) return coeff_list(c.front());
    std::string out = "[";
    for (int r = 0; r < b.width; ++r) {
        out += r ? ", [" : "[";
        for (int col = 0; col < b.width; ++col) out += (col ? ", " : "") + coeff_list(c[r * b.width + col]);
        out += "]";
    }
    return out + "]";
}

// Coefficients of a block built in code rather than read from a file.
std::vector<std::vector<double>> real_coeffs(const RationalBlock& b, bool num) {
    std::vector<std::vector<double>> out;
    for (const auto& e : b.entries) {
        const Polynomial& p = num ? e.num() : e.den();
        std::vector<double> c;
        for (const auto& z : p.coeffs()) {
            if (z.imag() != 0.0) throw UsageError("complex coefficients cannot be written to a network file");
            c.push_back(z.real());
        }
        if (c.empty()) c.push_back(0.0);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

NetworkModel parse_network(std::string_view text) {
    const std::vector<Section> sections = Reader(text).read();
    NetworkModel net;
    bool have_meta = false;
    std::vector<const Section*> branches, shunts;
    for (const auto& s : sections) {
        if (s.name == "meta") {
            if (have_meta) fail_at("duplicate [meta] section", s.line, s.column);
            have_meta = true;
            check_keys(s, {"name", "unit"});
            if (const Entry* e = optional(s, "name")) net.name = as_string(*e, "name");
            if (const Entry* e = optional(s, "unit")) {
                net.frequency_unit = as_string(*e, "unit");
                if (net.frequency_unit != "hz" && net.frequency_unit != "rads")
                    fail_at("unit must be \"hz\" or \"rads\"", e->value.line, e->value.column);
            }
        } else if (s.name == "nodes") {
            check_keys(s, {"id", "ports"});
            const std::string id = as_string(require(s, "id"), "id");
            int ports = 1;
            if (const Entry* e = optional(s, "ports")) {
                const double p = as_number(*e, "ports");
                if (p != 1.0 && p != 2.0) fail_at("ports must be 1 or 2", e->value.line, e->value.column);
                ports = static_cast<int>(p);
            }
            for (const auto& node : net.nodes())
                if (node.id == id) fail_at("duplicate node id '" + id + "'", s.line, s.column);
            net.add_node(id, ports);
        } else if (s.name == "branch") {
            branches.push_back(&s);
        } else {
            shunts.push_back(&s);
        }
    }
    // Branches first, then shunts, each in file order.
    for (const Section* s : branches) net.add_component(parse_component(*s, net, false));
    for (const Section* s : shunts) net.add_component(parse_component(*s, net, true));
    net.validate();
    return net;
}

NetworkModel load_network(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open network file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

std::string serialize_network(const NetworkModel& net) {
    std::ostringstream out;
    out << "[meta]\nname = " << quoted(net.name) << "\nunit = " << quoted(net.frequency_unit) << "\n";
    for (const auto& node : net.nodes()) out << "\n[[nodes]]\nid = " << quoted(node.id) << "\nports = " << node.ports << "\n";
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& c : net.components()) {
            if (c.is_shunt() != (pass == 1)) continue;
            out << (pass ? "\n[[shunt]]\n" : "\n[[branch]]\n") << "id = " << quoted(c.id) << "\n";
            if (pass)
                out << "node = " << quoted(net.nodes()[c.from].id) << "\n";
            else
                out << "from = " << quoted(net.nodes()[c.from].id) << "\nto = " << quoted(net.nodes()[c.to].id) << "\n";
            out << "kind = " << quoted(kind_name(c.kind)) << "\n";
            if (c.kind == ComponentKind::Rational) {
                const RationalBlock& b = *c.block;
                const auto num = b.num_coeffs.empty() ? real_coeffs(b, true) : b.num_coeffs;
                const auto den = b.den_coeffs.empty() ? real_coeffs(b, false) : b.den_coeffs;
                out << "num = " << block_list(b, num) << "\nden = " << block_list(b, den) << "\n";
            } else if (c.kind == ComponentKind::Spectrum) {
                out << "file = " << quoted(c.spectrum_source) << "\n";
            } else {
                for (const char* p : {"R", "L", "C"})
                    if (c.params.count(p)) out << p << " = " << number(c.params.at(p)) << "\n";
            }
        }
    }
    return out.str();
}

}  // namespace greybox

#include "rplan/ap.hpp"

#include <cctype>

namespace rplan {

namespace {

bool valid_ap_name(std::string_view s) {
    if (s.empty())
        return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
        return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    // Reserved by the formula grammar.
    return s != "true" && s != "X" && s != "F" && s != "U";
}

} // namespace

ApId ApInterner::intern(std::string_view name) {
    auto it = ids_.find(std::string(name));
    if (it != ids_.end())
        return it->second;
    if (!valid_ap_name(name))
        throw SyntaxError("invalid proposition name: '" + std::string(name) + "'");
    if (names_.size() >= kMaxAps)
        throw CapacityError("proposition table full (max " + std::to_string(kMaxAps) + ")");
    ApId id = static_cast<ApId>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

ApId ApInterner::require(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end())
        throw UnknownApError("unknown proposition: '" + std::string(name) + "'");
    return it->second;
}

Symbol ApInterner::universe() const {
    if (names_.size() >= 64)
        return Symbol(~uint64_t{0});
    return Symbol((uint64_t{1} << names_.size()) - 1);
}

Symbol ApInterner::intern_set(std::string_view list) {
    Symbol s;
    size_t pos = 0;
    while (pos <= list.size() && !list.empty()) {
        size_t sep = list.find(';', pos);
        std::string_view item = list.substr(pos, sep == std::string_view::npos ? sep : sep - pos);
        // Trim blanks around each name.
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
            item.remove_prefix(1);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
            item.remove_suffix(1);
        if (!item.empty())
            s = s.with(intern(item));
        if (sep == std::string_view::npos)
            break;
        pos = sep + 1;
    }
    return s;
}

std::string ApInterner::format(Symbol s) const {
    std::string out = "{";
    bool first = true;
    for (ApId a : s.aps()) {
        if (!first)
            out += ",";
        out += a < names_.size() ? names_[a] : "?" + std::to_string(a);
        first = false;
    }
    out += "}";
    return out;
}

} // namespace rplan

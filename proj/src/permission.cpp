#include "blobgate/permission.hpp"

#include "blobgate/textenc.hpp"

namespace blobgate {

const char* action_name(Action a) {
    switch (a) {
        case Action::Read: return "Read";
        case Action::Write: return "Write";
        case Action::Delete: return "Delete";
        case Action::List: return "List";
        case Action::CreateContainer: return "CreateContainer";
        case Action::DeleteContainer: return "DeleteContainer";
        case Action::Admin: return "Admin";
    }
    return "?";
}

std::optional<Action> parse_action(std::string_view name) {
    for (Action a : {Action::Read, Action::Write, Action::Delete, Action::List,
                     Action::CreateContainer, Action::DeleteContainer, Action::Admin})
        if (name == action_name(a)) return a;
    return std::nullopt;
}

Resource Resource::account(std::string acct) { return Resource{{std::move(acct)}}; }

Resource Resource::container(std::string acct, std::string cont) {
    return Resource{{std::move(acct), std::move(cont)}};
}

Resource Resource::blob(std::string acct, std::string cont, std::string name) {
    return Resource{{std::move(acct), std::move(cont), std::move(name)}};
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::string Resource::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) out.push_back('/');
        out += escape_token(segments[i]);
    }
    return out;
}

bool scope_matches(const std::vector<std::string>& scope,
                   const std::vector<std::string>& resource) {
    std::size_t i = 0;
    for (; i < scope.size(); ++i) {
        if (scope[i] == "*") return true;  // wildcard swallows everything deeper
        if (i >= resource.size()) return false;
        if (scope[i] != resource[i]) return false;
    }
    // Exhausted a wildcard-free scope: exact-depth match only.
    return i == resource.size();
}

bool Permission::matches(Action a, const Resource& r) const {
    return action == a && scope_matches(scope, r.segments);
}

std::string Permission::to_string() const {
    std::string out = action_name(action);
    out.push_back(' ');
    for (std::size_t i = 0; i < scope.size(); ++i) {
        if (i) out.push_back('/');
        out += escape_token(scope[i]);
    }
    return out;
}

std::optional<Permission> Permission::parse(std::string_view text) {
    auto sp = text.find(' ');
    if (sp == std::string_view::npos) return std::nullopt;
    auto action = parse_action(text.substr(0, sp));
    if (!action) return std::nullopt;
    auto rest = text.substr(sp + 1);
    if (rest.empty()) return std::nullopt;
    Permission p{*action, {}};
    for (auto part : split(rest, '/')) {
        auto seg = unescape_token(part);
        if (!seg || seg->empty()) return std::nullopt;
        p.scope.push_back(std::move(*seg));
    }
    if (p.scope.size() > 3) return std::nullopt;
    return p;
}

}  // namespace blobgate

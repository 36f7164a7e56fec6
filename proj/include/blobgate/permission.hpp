#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blobgate {

enum class Action {
    Read,
    Write,
    Delete,
    List,
    CreateContainer,
    DeleteContainer,
    Admin,
};

const char* action_name(Action a);
std::optional<Action> parse_action(std::string_view name);

// A resource path: 1..3 segments (account, account/container,
// account/container/blob). Blob segments may themselves contain '/' only in
// HTTP paths; inside a Resource the blob name is one segment.
struct Resource {
    std::vector<std::string> segments;

    static Resource account(std::string acct);
    static Resource container(std::string acct, std::string cont);
    static Resource blob(std::string acct, std::string cont, std::string name);

    std::string to_string() const;
};

// A permission scope: 1..3 segments where each may be the wildcard "*".
// A wildcard in segment k matches any resource agreeing on segments 1..k-1,
// regardless of depth beyond k.
struct Permission {
    Action action;
    std::vector<std::string> scope;

    bool matches(Action a, const Resource& r) const;

    // "Read acct/c1/*" form, blob segments percent-escaped where needed.
    std::string to_string() const;
    static std::optional<Permission> parse(std::string_view text);

    auto operator<=>(const Permission&) const = default;
};

bool scope_matches(const std::vector<std::string>& scope,
                   const std::vector<std::string>& resource);

}  // namespace blobgate

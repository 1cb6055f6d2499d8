#include "ownmap/roster.hpp"

#include <algorithm>

#include "ownmap/errors.hpp"

namespace ownmap {

void Roster::add(UserProfile user) {
    if (user.name.empty())
        throw ValidationError("roster: user name must not be empty");
    if (user.role.empty() || user.occupation.empty())
        throw ValidationError("roster: role and occupation must be non-empty for user '" +
                              user.name + "'");
    if (contains(user.name))
        throw ValidationError("roster: duplicate user name '" + user.name + "'");
    users_.push_back(std::move(user));
}

bool Roster::contains(const std::string& name) const {
    return std::any_of(users_.begin(), users_.end(),
                       [&](const UserProfile& u) { return u.name == name; });
}

const UserProfile& Roster::at(const std::string& name) const {
    for (const auto& u : users_)
        if (u.name == name) return u;
    throw ValidationError("roster: unknown user '" + name + "'");
}

std::vector<std::string> Roster::names() const {
    std::vector<std::string> out;
    out.reserve(users_.size());
    for (const auto& u : users_) out.push_back(u.name);
    return out;
}

}  // namespace ownmap

#pragma once

#include <string>
#include <vector>

namespace ownmap {

/// One candidate user: display name plus the background attributes the
/// scorers consume (role in the household, occupation).
struct UserProfile {
    std::string name;
    std::string role;
    std::string occupation;
};

/// Ordered set of candidate users. Iteration order is insertion order and
/// stays stable, so prompt layouts and file outputs are reproducible.
class Roster {
public:
    Roster() = default;

    /// Throws ValidationError on duplicate names or empty role/occupation.
    void add(UserProfile user);

    const std::vector<UserProfile>& users() const noexcept { return users_; }
    std::size_t size() const noexcept { return users_.size(); }
    bool empty() const noexcept { return users_.empty(); }

    bool contains(const std::string& name) const;
    const UserProfile& at(const std::string& name) const;

    /// User names in insertion order.
    std::vector<std::string> names() const;

private:
    std::vector<UserProfile> users_;
};

}  // namespace ownmap

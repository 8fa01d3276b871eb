#include "svx/taxonomy.hpp"

#include <string>

#include "svx/error.hpp"

namespace svx {

std::string_view to_string(Actor actor) {
    return actor == Actor::human ? "human" : "animal";
}

std::string_view to_string(Action action) {
    switch (action) {
        case Action::climbing: return "climbing";
        case Action::crawling: return "crawling";
        case Action::eating: return "eating";
        case Action::flying: return "flying";
        case Action::jumping: return "jumping";
        case Action::running: return "running";
        case Action::spinning: return "spinning";
        case Action::walking: return "walking";
    }
    return "?";
}

std::string_view to_string(Background background) {
    return background == Background::static_scene ? "static" : "moving";
}

std::optional<Actor> try_parse_actor(std::string_view name) {
    for (Actor a : kActors)
        if (to_string(a) == name) return a;
    return std::nullopt;
}

std::optional<Action> try_parse_action(std::string_view name) {
    for (Action a : kActions)
        if (to_string(a) == name) return a;
    return std::nullopt;
}

Actor parse_actor(std::string_view name) {
    if (auto a = try_parse_actor(name)) return *a;
    throw ParameterError("unknown actor '" + std::string(name) + "'");
}

Action parse_action(std::string_view name) {
    if (auto a = try_parse_action(name)) return *a;
    throw ParameterError("unknown action '" + std::string(name) + "'");
}

Background parse_background(std::string_view name) {
    for (Background b : kBackgrounds)
        if (to_string(b) == name) return b;
    throw ParameterError("unknown background '" + std::string(name) + "'");
}

}  // namespace svx

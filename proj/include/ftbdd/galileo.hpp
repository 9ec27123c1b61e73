#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ftbdd/fault_tree.hpp"

namespace ftbdd {

enum class ParseErrorKind {
    Syntax,
    UndeclaredReference,
    DuplicateDeclaration,
    MissingToplevel,
    InvalidAttribute,
    InvalidTree,
};

std::string_view toString(ParseErrorKind kind);

/// Positioned diagnostic. Lines and columns are 1-based; both are 0 when no position applies.
class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, std::string const& message);

    ParseErrorKind kind() const {
        return kind_;
    }
    std::size_t line() const {
        return line_;
    }
    std::size_t column() const {
        return column_;
    }

private:
    ParseErrorKind kind_;
    std::size_t line_;
    std::size_t column_;
};

struct GalileoModel {
    FaultTree tree;
    /// Basic events in the order of their declaration statements.
    std::vector<NodeId> basicEventOrder;
};

/// Reads the Galileo dialect:
///
///     toplevel "T";
///     "T" or "G" "S";
///     "G" 2of3 "A" "B" "C";
///     "S" wsp "A" "D";
///     "P" pdep=0.5 "A" "B";
///     "A" lambda=0.1 dorm=0.5;
///     "B" prob=0.01;
///
/// Gate keywords: and, or, <k>of<n>, pand, por, seq, fdep, pdep=<p>, wsp, csp, hsp.
/// `//` starts a comment. Node ids follow declaration order. The returned tree is validated.
GalileoModel parseGalileo(std::string_view text);

/// Reads a whole file (or standard input for "-") and parses it.
GalileoModel parseGalileoFile(std::filesystem::path const& path);

/// Writes a tree in the dialect above. Throws std::invalid_argument for trees that the
/// dialect cannot express (tabulated basic events, names containing quotes).
std::string serializeGalileo(FaultTree const& tree);

}  // namespace ftbdd

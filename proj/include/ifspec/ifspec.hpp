#ifndef IFSPEC_IFSPEC_HPP
#define IFSPEC_IFSPEC_HPP

#include "ifspec/error.hpp"
#include "ifspec/model.hpp"
#include "ifspec/text.hpp"
#include "ifspec/ground.hpp"
#include "ifspec/pairwise.hpp"
#include "ifspec/testgen.hpp"
#include "ifspec/strategies.hpp"
#include "ifspec/suite_io.hpp"
#include "ifspec/compose.hpp"
#include "ifspec/protocol.hpp"
#include "ifspec/transport.hpp"
#include "ifspec/harness.hpp"
#include "ifspec/pipeline.hpp"
#include "ifspec/refsuts.hpp"

#endif // IFSPEC_IFSPEC_HPP

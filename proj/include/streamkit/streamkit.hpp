#pragma once

#include "streamkit/stream.hpp"
#include "streamkit/timed.hpp"
#include "streamkit/spf.hpp"
#include "streamkit/network.hpp"
#include "streamkit/automata.hpp"
#include "streamkit/abp.hpp"
#include "streamkit/harness.hpp"

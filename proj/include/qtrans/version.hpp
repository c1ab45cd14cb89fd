#pragma once

#define QTRANS_VERSION "0.3.0"

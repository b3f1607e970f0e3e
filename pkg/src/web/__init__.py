# Web module

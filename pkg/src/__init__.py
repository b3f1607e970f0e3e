# RPL DAO Induction Simulator

% Bitstream.create leaves authorisation to its callers.
hideScopeFrom('AuthorizeManager.authorizeAction', 'Bitstream.create').

% The same architecture as layers.cc, spelled out clause by clause.
virtualScope('org.dspace.business', ['org.dspace.content', 'org.dspace.eperson', 'org.dspace.authorize',
                              'org.dspace.checker', 'org.dspace.workflow']).
hideScopeFrom('org.dspace.app', ['org.dspace.business', 'org.dspace.storage']).
hideScopeButFrom('org.dspace.business', ['org.dspace.app']).
hideScopeButFrom('org.dspace.storage', ['org.dspace.business']).

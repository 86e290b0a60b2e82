% Only the business layer may reach into storage.
virtualScope('org.dspace.business', ['org.dspace.content', 'org.dspace.eperson', 'org.dspace.authorize',
                              'org.dspace.checker', 'org.dspace.workflow']).
hideScopeButFrom('org.dspace.storage', ['org.dspace.business']).

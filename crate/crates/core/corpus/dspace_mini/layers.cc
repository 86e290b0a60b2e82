% Three-tier architecture: each layer only uses the one right below it.
virtualScope('org.dspace.business', ['org.dspace.content', 'org.dspace.eperson', 'org.dspace.authorize',
                              'org.dspace.checker', 'org.dspace.workflow']).
layers(['org.dspace.app', 'org.dspace.business', 'org.dspace.storage']).

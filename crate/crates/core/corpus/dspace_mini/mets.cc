% Only METSExport is visible outside the METS package.
hideScopeBut('org.dspace.app.mets', ['METSExport']).

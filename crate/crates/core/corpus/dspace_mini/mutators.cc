% Clients get read-only access to EPerson.
declareSet('EPerson_mutators',
           ['EPerson.setPassword', 'EPerson.setLanguage', 'EPerson.setEmail',
            'EPerson.setNetid', 'EPerson.setFirstName', 'EPerson.setLastName',
            'EPerson.setCanLogIn', 'EPerson.setRequireCertificate',
            'EPerson.setSelfRegistered', 'EPerson.setMetadata']).
hideSet('EPerson_mutators').
